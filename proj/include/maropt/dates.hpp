#pragma once

#include <chrono>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace maropt {

// Calendar date (no time of day), stored as days since 1970-01-01.
// Comparison and subtraction are integer operations on the serial day.
class Date {
public:
    Date() = default;

    static Date from_serial(int days) { return Date(days); }

    static std::optional<Date> from_ymd(int year, unsigned month, unsigned day) {
        std::chrono::year_month_day ymd{std::chrono::year{year},
                                        std::chrono::month{month},
                                        std::chrono::day{day}};
        if (!ymd.ok()) return std::nullopt;
        return Date(static_cast<int>(std::chrono::sys_days(ymd).time_since_epoch().count()));
    }

    // Strict ISO-8601 calendar date: YYYY-MM-DD.
    static std::optional<Date> parse(std::string_view text);

    int serial() const { return days_; }

    int year() const { return int(ymd().year()); }
    unsigned month() const { return unsigned(ymd().month()); }
    unsigned day() const { return unsigned(ymd().day()); }

    std::string to_string() const;

    friend auto operator<=>(const Date&, const Date&) = default;

private:
    explicit Date(int days) : days_(days) {}

    std::chrono::year_month_day ymd() const {
        return std::chrono::year_month_day(
            std::chrono::sys_days(std::chrono::days(days_)));
    }

    int days_ = 0;
};

// Calendar days from a to b (positive when b is later).
inline int days_between(Date a, Date b) { return b.serial() - a.serial(); }

inline constexpr double kDaysPerYear = 365.25;

inline double years_between(Date a, Date b) {
    return days_between(a, b) / kDaysPerYear;
}

} // namespace maropt
