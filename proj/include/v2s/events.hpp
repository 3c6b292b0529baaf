#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace v2s {

/// Microsecond timestamps. Time is integral everywhere in the pipeline.
using TimeUs = std::int64_t;

enum class Polarity : std::uint8_t { off = 0, on = 1 };

struct Pixel {
  std::uint32_t x = 0;
  std::uint32_t y = 0;

  friend auto operator<=>(const Pixel&, const Pixel&) = default;
};

struct SensorGeometry {
  std::uint32_t width = 1280;
  std::uint32_t height = 720;

  bool contains(Pixel p) const noexcept { return p.x < width && p.y < height; }
  friend bool operator==(const SensorGeometry&, const SensorGeometry&) = default;
};

struct Event {
  TimeUs t_us = 0;
  std::uint32_t x = 0;
  std::uint32_t y = 0;
  Polarity polarity = Polarity::off;

  Pixel pixel() const noexcept { return {x, y}; }
  friend bool operator==(const Event&, const Event&) = default;
};

/// Time-ordered events from one sensor. Immutable once constructed; the
/// constructor enforces ordering and bounds.
class EventStream {
 public:
  EventStream() = default;
  EventStream(SensorGeometry sensor, std::vector<Event> events);

  const std::vector<Event>& events() const noexcept { return events_; }
  SensorGeometry sensor() const noexcept { return sensor_; }
  std::size_t size() const noexcept { return events_.size(); }
  bool empty() const noexcept { return events_.empty(); }

  friend bool operator==(const EventStream&, const EventStream&) = default;

 private:
  SensorGeometry sensor_{};
  std::vector<Event> events_;
};

struct PixelEvent {
  TimeUs t_us = 0;
  Polarity polarity = Polarity::off;

  friend bool operator==(const PixelEvent&, const PixelEvent&) = default;
};

/// Projection of an EventStream onto a single pixel.
struct PixelStream {
  Pixel pixel{};
  std::vector<PixelEvent> events;

  friend bool operator==(const PixelStream&, const PixelStream&) = default;
};

inline constexpr std::string_view kEventHeader = "t_us,x,y,p";

/// Parses the `t_us,x,y,p` CSV format. Rejects out-of-order timestamps
/// instead of sorting them.
EventStream parse_event_stream(std::string_view text, SensorGeometry sensor = {});

std::string write_event_stream(const EventStream& stream);

PixelStream filter_pixel(const EventStream& stream, Pixel pixel);

EventStream read_event_file(const std::filesystem::path& path, SensorGeometry sensor = {});
void write_event_file(const std::filesystem::path& path, const EventStream& stream);

// Whole-file helpers shared by the readers in this library.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace v2s
