#include "areasim/common.hpp"

namespace areasim {

std::string_view to_string(RangeClass c) {
    return c == RangeClass::intra ? "intra" : "inter";
}

RangeClass range_class_from_string(std::string_view s) {
    if (s == "intra") return RangeClass::intra;
    if (s == "inter") return RangeClass::inter;
    throw ValidationError("unknown range class '" + std::string(s) + "'");
}

std::string_view to_string(Scheme s) {
    return s == Scheme::conventional ? "conventional" : "structure_aware";
}

Scheme scheme_from_string(std::string_view s) {
    if (s == "conventional") return Scheme::conventional;
    if (s == "structure_aware") return Scheme::structure_aware;
    throw ValidationError("unknown scheme '" + std::string(s) + "'");
}

} // namespace areasim
