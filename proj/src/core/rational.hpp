#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>

namespace fhm {

using Rat = mpq_class;

/// Parses "p/q", integer, or finite-decimal literals ("-3/7", "12", "0.25").
std::optional<Rat> parse_rational(const std::string& text);

/// "p/q" when the denominator is not 1, plain integer otherwise.
std::string rational_to_string(const Rat& q);

/// Fractional part in [0, 1).
Rat mod_one(const Rat& q);

/// Shortest decimal that round-trips through double (17 significant digits).
std::string double_to_string(double v);

}  // namespace fhm
