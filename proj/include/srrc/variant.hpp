#pragma once

#include <stdexcept>
#include <string>

namespace srrc {

/// The five detector variants: plain echo-state network on the raw series,
/// logistic regression on saliency (optionally with the raw series), and the
/// two reservoir models driven by saliency (optionally with the raw series).
enum class ModelVariant { rc, sr_logi, multi_sr_logi, sr_rc, multi_sr_rc };

inline std::string to_string(ModelVariant v) {
    switch (v) {
        case ModelVariant::rc: return "rc";
        case ModelVariant::sr_logi: return "sr-logi";
        case ModelVariant::multi_sr_logi: return "multi-sr-logi";
        case ModelVariant::sr_rc: return "sr-rc";
        case ModelVariant::multi_sr_rc: return "multi-sr-rc";
    }
    throw std::logic_error("to_string: unknown model variant");
}

inline ModelVariant variant_from_string(const std::string& name) {
    if (name == "rc") return ModelVariant::rc;
    if (name == "sr-logi") return ModelVariant::sr_logi;
    if (name == "multi-sr-logi") return ModelVariant::multi_sr_logi;
    if (name == "sr-rc") return ModelVariant::sr_rc;
    if (name == "multi-sr-rc") return ModelVariant::multi_sr_rc;
    throw std::invalid_argument("unknown model variant '" + name + "'");
}

inline bool variant_uses_reservoir(ModelVariant v) {
    return v == ModelVariant::rc || v == ModelVariant::sr_rc ||
           v == ModelVariant::multi_sr_rc;
}

inline bool variant_uses_saliency(ModelVariant v) {
    return v != ModelVariant::rc;
}

inline bool variant_uses_series_input(ModelVariant v) {
    return v == ModelVariant::rc || v == ModelVariant::multi_sr_logi ||
           v == ModelVariant::multi_sr_rc;
}

} // namespace srrc
