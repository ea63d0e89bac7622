#include "minimod/propagator.hpp"

namespace minimod {

Propagator propagator_from_name(const std::string& name) {
    if (name == "acoustic_iso_cd") return Propagator::AcousticIsoCd;
    if (name == "acoustic_iso") return Propagator::AcousticIso;
    if (name == "elastic_iso") return Propagator::ElasticIso;
    throw ConfigError("unknown propagator '" + name +
                      "' (valid: acoustic_iso_cd, acoustic_iso, elastic_iso)");
}

std::string propagator_name(Propagator p) {
    switch (p) {
        case Propagator::AcousticIsoCd: return "acoustic_iso_cd";
        case Propagator::AcousticIso: return "acoustic_iso";
        default: return "elastic_iso";
    }
}

} // namespace minimod
