#pragma once

#include <stdexcept>
#include <string>

namespace maropt {

// Every failure the library reports carries one of these codes so callers
// (and the CLI exit-code mapping) can react without parsing messages.
enum class Errc {
    file_not_found,
    missing_column,
    unparsable_date,
    duplicate_date,
    unparsable_value,
    non_positive_price,
    duplicate_ticker,
    too_few_rows,
    too_few_points,
    empty_window,
    infeasible_rule,
    infeasible_bounds,
    ticker_mismatch,
    unknown_ticker,
    invalid_config,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

inline const char* errc_name(Errc code) {
    switch (code) {
        case Errc::file_not_found: return "FileNotFound";
        case Errc::missing_column: return "MissingColumn";
        case Errc::unparsable_date: return "UnparsableDate";
        case Errc::duplicate_date: return "DuplicateDate";
        case Errc::unparsable_value: return "UnparsableValue";
        case Errc::non_positive_price: return "NonPositivePrice";
        case Errc::duplicate_ticker: return "DuplicateTicker";
        case Errc::too_few_rows: return "TooFewRows";
        case Errc::too_few_points: return "TooFewPoints";
        case Errc::empty_window: return "EmptyWindow";
        case Errc::infeasible_rule: return "InfeasibleRule";
        case Errc::infeasible_bounds: return "InfeasibleBounds";
        case Errc::ticker_mismatch: return "TickerMismatch";
        case Errc::unknown_ticker: return "UnknownTicker";
        case Errc::invalid_config: return "InvalidConfig";
    }
    return "Error";
}

[[noreturn]] inline void raise(Errc code, const std::string& message) {
    throw Error(code, std::string(errc_name(code)) + ": " + message);
}

} // namespace maropt
