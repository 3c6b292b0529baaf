#include "v2s/metrics.hpp"

#include <numeric>
#include <sstream>

#include "v2s/error.hpp"

namespace v2s {

ConfusionMatrix::ConfusionMatrix(std::size_t classes, std::vector<std::string> class_names)
    : k_(classes), cells_(classes * classes, 0), names_(std::move(class_names)) {
  if (classes == 0) throw Error(ErrorCode::ClassOutOfRange, "confusion matrix needs at least one class");
  if (names_.empty()) {
    for (std::size_t c = 0; c < k_; ++c) names_.push_back(std::to_string(c));
  }
  if (names_.size() != k_) throw Error(ErrorCode::LengthMismatch, "class name count differs from class count");
}

void ConfusionMatrix::add(std::size_t truth, std::size_t predicted, std::uint64_t n) {
  if (truth >= k_ || predicted >= k_) throw Error(ErrorCode::ClassOutOfRange, "class index outside matrix");
  cells_[truth * k_ + predicted] += n;
}

std::uint64_t ConfusionMatrix::total() const noexcept {
  return std::accumulate(cells_.begin(), cells_.end(), std::uint64_t{0});
}

std::string ConfusionMatrix::to_csv() const {
  std::ostringstream out;
  out << "true\\predicted";
  for (const auto& n : names_) out << ',' << n;
  out << '\n';
  for (std::size_t i = 0; i < k_; ++i) {
    out << names_[i];
    for (std::size_t j = 0; j < k_; ++j) out << ',' << at(i, j);
    out << '\n';
  }
  return out.str();
}

ConfusionMatrix confusion_matrix(std::span<const std::size_t> predictions, std::span<const std::size_t> labels,
                                 std::size_t classes) {
  if (predictions.size() != labels.size()) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(predictions.size()) + " predictions vs " +
                                               std::to_string(labels.size()) + " labels");
  }
  ConfusionMatrix cm(classes);
  for (std::size_t i = 0; i < labels.size(); ++i) cm.add(labels[i], predictions[i]);
  return cm;
}

double macro_f1(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw Error(ErrorCode::EmptyMatrix, "macro-F1 of an empty confusion matrix");
  const std::size_t k = cm.classes();
  double sum = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    std::uint64_t tp = cm.at(c, c);
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    for (std::size_t o = 0; o < k; ++o) {
      if (o == c) continue;
      fp += cm.at(o, c);
      fn += cm.at(c, o);
    }
    // 2PR/(P+R) simplifies to 2TP/(2TP+FP+FN), and is 0 whenever TP is 0
    if (tp > 0) sum += 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
  }
  return sum / static_cast<double>(k);
}

}  // namespace v2s
