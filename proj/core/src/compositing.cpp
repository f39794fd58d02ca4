#include "fusedrf/render.hpp"

#include <cmath>
#include <stdexcept>

namespace fusedrf {

void validate_render_config(const RenderConfig& cfg) {
    if (!(cfg.step > 0.0) || !std::isfinite(cfg.step)) {
        throw std::invalid_argument("render config: step must be a positive finite number");
    }
    if (!(cfg.t_near >= 0.0) || !(cfg.t_far >= cfg.t_near)) {
        throw std::invalid_argument("render config: need 0 <= t_near <= t_far");
    }
}

Vec3 composite_ray(std::span<const AlphaColor> samples, const Vec3& background) {
    Vec3 color = Vec3::Zero();
    double transmittance = 1.0;
    for (const auto& s : samples) {
        color += (transmittance * s.alpha) * s.color;
        transmittance *= 1.0 - s.alpha;
    }
    return color + transmittance * background;
}

CompositeGradient composite_ray_gradient(std::span<const AlphaColor> samples, const Vec3& background,
                                         const Vec3& d_loss_d_color) {
    const std::size_t n = samples.size();
    CompositeGradient grad;
    grad.d_alpha.resize(n);
    grad.d_color.resize(n);

    std::vector<double> transmittance(n + 1);
    transmittance[0] = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        transmittance[i + 1] = transmittance[i] * (1.0 - samples[i].alpha);
    }

    // dC/da_i = T_i c_i - (contribution of everything behind i, including background) / (1 - a_i).
    // Accumulating `behind` back-to-front avoids dividing by (1 - a_i), which may be zero.
    Vec3 behind = background;  // color seen through sample i, in units of T_{i+1}
    for (std::size_t k = n; k-- > 0;) {
        const auto& s = samples[k];
        grad.d_color[k] = (transmittance[k] * s.alpha) * d_loss_d_color;
        grad.d_alpha[k] = transmittance[k] * (s.color - behind).dot(d_loss_d_color);
        behind = s.alpha * s.color + (1.0 - s.alpha) * behind;
    }
    return grad;
}

}  // namespace fusedrf
