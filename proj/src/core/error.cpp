#include "core/error.hpp"

namespace fhm {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::bad_argument: return "BadArgument";
    case Errc::parse_error: return "ParseError";
    case Errc::io_error: return "IoError";
    case Errc::non_contractive: return "NonContractive";
    case Errc::disconnected: return "Disconnected";
    case Errc::not_pcf: return "NotPCF";
    case Errc::bad_letter: return "BadLetter";
    case Errc::level_too_small: return "LevelTooSmall";
    case Errc::level_too_large: return "LevelTooLarge";
    case Errc::unsupported_fractal: return "UnsupportedFractal";
    case Errc::ambiguous_path: return "AmbiguousPath";
    case Errc::no_admissible_cut: return "NoAdmissibleCut";
    case Errc::cut_not_in_graph: return "CutNotInGraph";
    case Errc::cut_on_boundary: return "CutOnBoundary";
    case Errc::increment_too_large: return "IncrementTooLarge";
    case Errc::singular_system: return "SingularSystem";
    case Errc::singular_interior: return "SingularInterior";
    case Errc::no_fixed_point: return "NoFixedPoint";
    case Errc::missing_value: return "MissingValue";
    case Errc::missing_coordinates: return "MissingCoordinates";
    case Errc::degree_mismatch: return "DegreeMismatch";
    case Errc::residual_too_large: return "ResidualTooLarge";
    case Errc::internal: return "InternalError";
  }
  return "UnknownError";
}

void fail(Errc code, const std::string& msg) { throw Error(code, msg); }

}  // namespace fhm
