#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace heatcast {

// Proleptic Gregorian calendar date in naive local time. No timezone
// handling: daylight-saving transition days simply fail the 96-slot check
// downstream and are dropped from the pool.
struct Date {
  int year = 0;
  int month = 0;  // 1..12
  int day = 0;    // 1..31

  auto operator<=>(const Date&) const = default;

  bool ok() const;
  std::string to_string() const;  // YYYY-MM-DD
  static std::optional<Date> parse(std::string_view text);
};

int to_serial(const Date& d);  // days since 1970-01-01
Date from_serial(int days);
int weekday(const Date& d);  // 0 = Monday ... 6 = Sunday
Date add_days(const Date& d, int n);

// 15-minute grid inside one day: slot 1 covers 00:00, slot 96 covers 23:45.
inline constexpr int kSlotsPerDay = 96;
inline constexpr int kSlotMinutes = 15;

inline int slot_minute(int slot) { return (slot - 1) * kSlotMinutes; }

std::string format_slot_time(int slot);                       // HH:MM
std::string format_timestamp(const Date& d, int slot);        // YYYY-MM-DDTHH:MM

struct Timestamp {
  Date date;
  int minute = 0;  // minute of day, 0..1439

  auto operator<=>(const Timestamp&) const = default;

  bool on_quarter() const { return minute % kSlotMinutes == 0; }
  int slot() const { return minute / kSlotMinutes + 1; }

  std::string to_string() const;
  // Accepts YYYY-MM-DDTHH:MM with an optional ":00" seconds field.
  static std::optional<Timestamp> parse(std::string_view text);
};

}  // namespace heatcast
