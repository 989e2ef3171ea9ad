#include "tempabd/calendar.hpp"

#include <chrono>
#include <cstdio>

namespace tempabd {

namespace chr = std::chrono;

namespace {

std::int64_t days_from_civil(int y, int m, int d) {
  chr::year_month_day ymd{chr::year{y}, chr::month{static_cast<unsigned>(m)},
                          chr::day{static_cast<unsigned>(d)}};
  return chr::sys_days{ymd}.time_since_epoch().count();
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

std::string CalendarHour::to_string() const {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d", year, month, day, hour);
  return buf;
}

bool is_leap_year(int year) { return chr::year{year}.is_leap(); }

int days_in_month(int year, int month) {
  auto last = chr::year_month_day_last{chr::year{year},
                                       chr::month_day_last{chr::month{static_cast<unsigned>(month)}}};
  return static_cast<int>(static_cast<unsigned>(last.day()));
}

bool is_valid(const CalendarHour& t) {
  return t.year >= kMinYear && t.year <= kMaxYear && t.month >= 1 && t.month <= 12 && t.day >= 1 &&
         t.day <= days_in_month(t.year, t.month) && t.hour >= 0 && t.hour <= 23;
}

std::int64_t to_hours(const CalendarHour& t) {
  return days_from_civil(t.year, t.month, t.day) * 24 + t.hour;
}

CalendarHour from_hours(std::int64_t hours) {
  std::int64_t days = floor_div(hours, 24);
  chr::year_month_day ymd{chr::sys_days{chr::days{days}}};
  return CalendarHour{static_cast<int>(ymd.year()), static_cast<int>(static_cast<unsigned>(ymd.month())),
                      static_cast<int>(static_cast<unsigned>(ymd.day())),
                      static_cast<int>(hours - days * 24)};
}

std::int64_t min_hours() { return to_hours({kMinYear, 1, 1, 0}); }
std::int64_t max_hours() { return to_hours({kMaxYear, 12, 31, 23}); }

CalendarHour next_day(const CalendarHour& t) {
  auto d = chr::sys_days{chr::year_month_day{chr::year{t.year}, chr::month{static_cast<unsigned>(t.month)},
                                             chr::day{static_cast<unsigned>(t.day)}}} +
           chr::days{1};
  chr::year_month_day ymd{d};
  return CalendarHour{static_cast<int>(ymd.year()), static_cast<int>(static_cast<unsigned>(ymd.month())),
                      static_cast<int>(static_cast<unsigned>(ymd.day())), 0};
}

}  // namespace tempabd
