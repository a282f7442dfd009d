#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace liabnet {

// Failure codes raised by the library. The CLI maps them onto process
// exit codes; tests match on them directly.
enum class errc {
    index_out_of_range,
    forbidden_block_entry,
    self_loop,
    non_positive_amount,
    non_finite_amount,
    duplicate_entry,
    invalid_record,
    empty_network,
    empty_selection,
    schema_mismatch,
    count_mismatch,
    no_connected_banks,
    empty_seed_set,
    zero_total_risk,
    missing_capital,
    missing_bank_liabilities,
    inconsistent_dimensions,
    invalid_argument,
    invalid_config,
    io_error,
};

inline std::string_view to_string(errc c) {
    switch (c) {
        case errc::index_out_of_range:       return "index_out_of_range";
        case errc::forbidden_block_entry:    return "forbidden_block_entry";
        case errc::self_loop:                return "self_loop";
        case errc::non_positive_amount:      return "non_positive_amount";
        case errc::non_finite_amount:        return "non_finite_amount";
        case errc::duplicate_entry:          return "duplicate_entry";
        case errc::invalid_record:           return "invalid_record";
        case errc::empty_network:            return "empty_network";
        case errc::empty_selection:          return "empty_selection";
        case errc::schema_mismatch:          return "schema_mismatch";
        case errc::count_mismatch:           return "count_mismatch";
        case errc::no_connected_banks:       return "no_connected_banks";
        case errc::empty_seed_set:           return "empty_seed_set";
        case errc::zero_total_risk:          return "zero_total_risk";
        case errc::missing_capital:          return "missing_capital";
        case errc::missing_bank_liabilities: return "missing_bank_liabilities";
        case errc::inconsistent_dimensions:  return "inconsistent_dimensions";
        case errc::invalid_argument:         return "invalid_argument";
        case errc::invalid_config:           return "invalid_config";
        case errc::io_error:                 return "io_error";
    }
    return "unknown";
}

class error : public std::runtime_error {
public:
    error(errc code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& message) {
    throw error(code, message);
}

} // namespace liabnet
