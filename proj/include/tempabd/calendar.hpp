#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace tempabd {

/// A proleptic Gregorian calendar hour. Hours are the finest resolution.
struct CalendarHour {
  int year = 1999;
  int month = 1;
  int day = 1;
  int hour = 0;

  friend auto operator<=>(const CalendarHour&, const CalendarHour&) = default;
  std::string to_string() const;
};

inline constexpr int kMinYear = 1;
inline constexpr int kMaxYear = 9999;

bool is_leap_year(int year);
int days_in_month(int year, int month);
bool is_valid(const CalendarHour& t);

/// Hours since 1970-01-01 00:00. Order-preserving bijection on valid hours.
std::int64_t to_hours(const CalendarHour& t);
CalendarHour from_hours(std::int64_t hours);

std::int64_t min_hours();
std::int64_t max_hours();

/// Midnight of the following calendar day. Precondition: `is_valid(t)`.
CalendarHour next_day(const CalendarHour& t);

}  // namespace tempabd
