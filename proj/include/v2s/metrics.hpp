#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace v2s {

/// Square count matrix indexed [true_class][predicted_class].
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t classes, std::vector<std::string> class_names = {});

  std::size_t classes() const noexcept { return k_; }
  std::uint64_t at(std::size_t truth, std::size_t predicted) const { return cells_.at(truth * k_ + predicted); }
  void add(std::size_t truth, std::size_t predicted, std::uint64_t n = 1);
  std::uint64_t total() const noexcept;
  const std::vector<std::string>& class_names() const noexcept { return names_; }

  /// Header `true\predicted,<names...>` then one row per true class.
  std::string to_csv() const;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::size_t k_;
  std::vector<std::uint64_t> cells_;
  std::vector<std::string> names_;
};

ConfusionMatrix confusion_matrix(std::span<const std::size_t> predictions, std::span<const std::size_t> labels,
                                 std::size_t classes);

/// Unweighted mean of per-class F1, with 0/0 taken as 0.
double macro_f1(const ConfusionMatrix& cm);

}  // namespace v2s
