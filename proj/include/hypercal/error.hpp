#ifndef HYPERCAL_ERROR_HPP
#define HYPERCAL_ERROR_HPP

#include <stdexcept>
#include <string>

namespace hypercal {

// Every failure in the toolkit is reported as an Error carrying one of
// these codes. Parsers additionally put the offending line number into
// the message text.
enum class errc {
    // spectral core
    grid_mismatch,
    unit_mismatch,
    target_out_of_range,
    zero_vector,
    bad_width,
    empty_roi,
    out_of_bounds,
    bad_value,
    // calibration
    no_peak,
    fit_diverged,
    saturated_profile,
    insufficient_steps,
    zero_responsivity,
    // radcal
    missing_calibration,
    zero_irradiance,
    out_of_window,
    domain_error,
    // io
    bad_magic,
    missing_key,
    malformed_list,
    size_mismatch,
    unsupported_data_type,
    non_monotone_wavelength,
    non_monotone_time,
    parse_error,
    missing_metadata_key,
    io_error,
    bad_config,
};

const char* errc_name(errc code);

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message),
          code_(code) {}

    errc code() const { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& message) {
    throw Error(code, message);
}

// Exit code the CLI maps an error to: 1 for input/validation problems,
// 2 for failures arising inside a computation.
int cli_exit_code(errc code);

} // namespace hypercal

#endif
