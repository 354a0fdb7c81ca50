#include "heatcast/time.hpp"

#include <cstdio>

namespace heatcast {
namespace {

// Howard Hinnant's civil date algorithms.
int days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const int era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<int>(doe) - 719468;
}

void civil_from_days(int z, int& y, int& m, int& d) {
  z += 719468;
  const int era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = static_cast<int>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
  y += m <= 2;
}

bool parse_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > s.size()) return false;
  int v = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    char c = s[i];
    if (c < '0' || c > '9') return false;
    v = v * 10 + (c - '0');
  }
  out = v;
  return true;
}

}  // namespace

bool Date::ok() const {
  if (month < 1 || month > 12 || day < 1) return false;
  static constexpr int lengths[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  int max_day = lengths[month - 1];
  bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
  if (month == 2 && leap) max_day = 29;
  return day <= max_day;
}

std::string Date::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
  return buf;
}

std::optional<Date> Date::parse(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  Date d;
  if (!parse_int(text, 0, 4, d.year) || !parse_int(text, 5, 2, d.month) ||
      !parse_int(text, 8, 2, d.day)) {
    return std::nullopt;
  }
  if (!d.ok()) return std::nullopt;
  return d;
}

int to_serial(const Date& d) { return days_from_civil(d.year, d.month, d.day); }

Date from_serial(int days) {
  Date d;
  civil_from_days(days, d.year, d.month, d.day);
  return d;
}

int weekday(const Date& d) {
  // serial day 0 is 1970-01-01, a Thursday (ISO index 3).
  int s = to_serial(d);
  return ((s % 7) + 7 + 3) % 7;
}

Date add_days(const Date& d, int n) { return from_serial(to_serial(d) + n); }

std::string format_slot_time(int slot) {
  int minute = slot_minute(slot);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%02d:%02d", minute / 60, minute % 60);
  return buf;
}

std::string format_timestamp(const Date& d, int slot) {
  return d.to_string() + "T" + format_slot_time(slot);
}

std::string Timestamp::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "T%02d:%02d", minute / 60, minute % 60);
  return date.to_string() + buf;
}

std::optional<Timestamp> Timestamp::parse(std::string_view text) {
  if (text.size() != 16 && text.size() != 19) return std::nullopt;
  if (text[10] != 'T' || text[13] != ':') return std::nullopt;
  auto date = Date::parse(text.substr(0, 10));
  if (!date) return std::nullopt;
  int hour = 0, min = 0;
  if (!parse_int(text, 11, 2, hour) || !parse_int(text, 14, 2, min)) return std::nullopt;
  if (hour > 23 || min > 59) return std::nullopt;
  if (text.size() == 19) {
    int sec = 0;
    if (text[16] != ':' || !parse_int(text, 17, 2, sec) || sec != 0) return std::nullopt;
  }
  return Timestamp{*date, hour * 60 + min};
}

}  // namespace heatcast
