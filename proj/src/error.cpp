#include "hypercal/error.hpp"

namespace hypercal {

const char* errc_name(errc code) {
    switch (code) {
    case errc::grid_mismatch: return "GridMismatch";
    case errc::unit_mismatch: return "UnitMismatch";
    case errc::target_out_of_range: return "TargetOutOfRange";
    case errc::zero_vector: return "ZeroVector";
    case errc::bad_width: return "BadWidth";
    case errc::empty_roi: return "EmptyRoi";
    case errc::out_of_bounds: return "OutOfBounds";
    case errc::bad_value: return "BadValue";
    case errc::no_peak: return "NoPeak";
    case errc::fit_diverged: return "FitDiverged";
    case errc::saturated_profile: return "SaturatedProfile";
    case errc::insufficient_steps: return "InsufficientSteps";
    case errc::zero_responsivity: return "ZeroResponsivity";
    case errc::missing_calibration: return "MissingCalibration";
    case errc::zero_irradiance: return "ZeroIrradiance";
    case errc::out_of_window: return "OutOfWindow";
    case errc::domain_error: return "DomainError";
    case errc::bad_magic: return "BadMagic";
    case errc::missing_key: return "MissingKey";
    case errc::malformed_list: return "MalformedList";
    case errc::size_mismatch: return "SizeMismatch";
    case errc::unsupported_data_type: return "UnsupportedDataType";
    case errc::non_monotone_wavelength: return "NonMonotoneWavelength";
    case errc::non_monotone_time: return "NonMonotoneTime";
    case errc::parse_error: return "ParseError";
    case errc::missing_metadata_key: return "MissingMetadataKey";
    case errc::io_error: return "IoError";
    case errc::bad_config: return "BadConfig";
    }
    return "UnknownError";
}

int cli_exit_code(errc code) {
    switch (code) {
    case errc::no_peak:
    case errc::fit_diverged:
    case errc::saturated_profile:
    case errc::zero_responsivity:
    case errc::zero_irradiance:
        return 2;
    default:
        return 1;
    }
}

} // namespace hypercal
