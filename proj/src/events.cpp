#include "v2s/events.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "v2s/error.hpp"

namespace v2s {
namespace {

void check_event(const Event& e, SensorGeometry sensor, TimeUs prev_t, std::size_t index) {
  if (e.t_us < prev_t) {
    throw Error(ErrorCode::NonMonotonicTimestamp,
                "event " + std::to_string(index) + " at t=" + std::to_string(e.t_us) +
                    " precedes t=" + std::to_string(prev_t));
  }
  if (!sensor.contains(e.pixel())) {
    throw Error(ErrorCode::OutOfBoundsPixel, "event " + std::to_string(index) + " at (" + std::to_string(e.x) +
                                                 "," + std::to_string(e.y) + ") outside " +
                                                 std::to_string(sensor.width) + "x" +
                                                 std::to_string(sensor.height));
  }
}

template <typename Int>
bool parse_int(std::string_view field, Int& out) {
  if (field.empty()) return false;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc() && ptr == field.data() + field.size();
}

}  // namespace

EventStream::EventStream(SensorGeometry sensor, std::vector<Event> events)
    : sensor_(sensor), events_(std::move(events)) {
  TimeUs prev = 0;
  for (std::size_t i = 0; i < events_.size(); ++i) {
    const Event& e = events_[i];
    if (e.t_us < 0) throw Error(ErrorCode::MalformedLine, "negative timestamp in event " + std::to_string(i));
    if (e.polarity != Polarity::on && e.polarity != Polarity::off) {
      throw Error(ErrorCode::MalformedLine, "bad polarity in event " + std::to_string(i));
    }
    check_event(e, sensor_, prev, i);
    prev = e.t_us;
  }
}

EventStream parse_event_stream(std::string_view text, SensorGeometry sensor) {
  std::vector<Event> events;
  std::size_t line_no = 0;
  bool saw_header = false;
  TimeUs prev = 0;

  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;

    if (!saw_header) {
      if (line != kEventHeader) {
        throw Error(ErrorCode::MalformedLine, "line 1: expected header '" + std::string(kEventHeader) + "'");
      }
      saw_header = true;
      continue;
    }

    std::string_view fields[4];
    std::size_t count = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == ',') {
        if (count < 4) fields[count] = line.substr(start, i - start);
        ++count;
        start = i + 1;
      }
    }
    const auto where = "line " + std::to_string(line_no);
    if (count != 4) throw Error(ErrorCode::MalformedLine, where + ": expected 4 fields");

    Event e;
    unsigned p = 0;
    if (!parse_int(fields[0], e.t_us) || e.t_us < 0 || !parse_int(fields[1], e.x) || !parse_int(fields[2], e.y) ||
        !parse_int(fields[3], p) || p > 1) {
      throw Error(ErrorCode::MalformedLine, where + ": fields must be non-negative integers with p in {0,1}");
    }
    e.polarity = static_cast<Polarity>(p);
    check_event(e, sensor, prev, events.size());
    prev = e.t_us;
    events.push_back(e);
  }
  if (!saw_header) throw Error(ErrorCode::MalformedLine, "missing header");
  return EventStream(sensor, std::move(events));
}

std::string write_event_stream(const EventStream& stream) {
  std::string out;
  out.reserve(16 + stream.size() * 20);
  out.append(kEventHeader);
  out.push_back('\n');
  auto append = [&out](auto value) {
    char buf[24];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    out.append(buf, end);
  };
  for (const Event& e : stream.events()) {
    append(e.t_us);
    out.push_back(',');
    append(e.x);
    out.push_back(',');
    append(e.y);
    out.push_back(',');
    out.push_back(e.polarity == Polarity::on ? '1' : '0');
    out.push_back('\n');
  }
  return out;
}

PixelStream filter_pixel(const EventStream& stream, Pixel pixel) {
  if (!stream.sensor().contains(pixel)) {
    throw Error(ErrorCode::OutOfBoundsPixel,
                "pixel (" + std::to_string(pixel.x) + "," + std::to_string(pixel.y) + ") outside sensor");
  }
  PixelStream ps{pixel, {}};
  for (const Event& e : stream.events()) {
    if (e.x == pixel.x && e.y == pixel.y) ps.events.push_back({e.t_us, e.polarity});
  }
  return ps;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

EventStream read_event_file(const std::filesystem::path& path, SensorGeometry sensor) {
  return parse_event_stream(read_text_file(path), sensor);
}

void write_event_file(const std::filesystem::path& path, const EventStream& stream) {
  write_text_file(path, write_event_stream(stream));
}

}  // namespace v2s
