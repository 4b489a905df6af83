#include "ncce/channel.hpp"

#include <cmath>
#include <limits>

#include "ncce/fourier.hpp"

namespace ncce {

void ArrayConfig::validate() const {
    if (n_elements < 2)
        throw InvalidInputError("ArrayConfig: n_elements must be >= 2");
    if (!(spacing_over_wavelength > 0.0) || spacing_over_wavelength > 1.0)
        throw InvalidInputError("ArrayConfig: spacing_over_wavelength must be in (0, 1]");
}

double wrap_spatial_freq(double omega) {
    double w = std::remainder(omega, kTwoPi); // in [-pi, pi], ties to even
    if (w >= kPi)
        w -= kTwoPi;
    return w;
}

double spatial_freq_distance(double a, double b) {
    return std::abs(std::remainder(a - b, kTwoPi));
}

VecC steering_vector(const ArrayConfig& array, double omega) {
    VecC a(array.n_elements);
    for (int n = 1; n <= array.n_elements; ++n)
        a[n - 1] = cplx(std::cos(n * omega), std::sin(n * omega));
    return a;
}

VecC steering_vector_derivative(const ArrayConfig& array, double omega) {
    VecC d(array.n_elements);
    for (int n = 1; n <= array.n_elements; ++n) {
        cplx e(std::cos(n * omega), std::sin(n * omega));
        d[n - 1] = cplx(0.0, static_cast<double>(n)) * e;
    }
    return d;
}

double spatial_freq_from_angle(double theta, double spacing_over_wavelength) {
    return wrap_spatial_freq(kTwoPi * spacing_over_wavelength * std::sin(theta));
}

VecC synthesize_channel(const SparseChannel& channel) {
    channel.array.validate();
    VecC h = VecC::Zero(channel.array.n_elements);
    for (const auto& p : channel.paths)
        h += p.amplitude * steering_vector(channel.array, p.spatial_freq);
    return h;
}

double beam_gain(const VecC& h, double omega) {
    // a(w)^H h = sum_n conj(exp(j*n*w)) h_n
    cplx acc(0.0, 0.0);
    const cplx step(std::cos(omega), -std::sin(omega));
    cplx phase = step;
    for (int n = 0; n < h.size(); ++n) {
        acc += phase * h[n];
        phase *= step;
    }
    return std::abs(acc);
}

namespace {

// p(w) = |a(w)^H h|^2 and its first two derivatives in w.
struct GainProbe {
    double p, dp, d2p;
};

GainProbe probe_gain(const VecC& h, double omega) {
    cplx q(0.0, 0.0), dq(0.0, 0.0), d2q(0.0, 0.0);
    const cplx step(std::cos(omega), -std::sin(omega));
    cplx phase = step;
    for (int i = 0; i < h.size(); ++i) {
        const double n = static_cast<double>(i + 1);
        const cplx term = phase * h[i]; // conj(e^{jnw}) h_n
        q += term;
        dq += cplx(0.0, -n) * term;
        d2q += cplx(-n * n, 0.0) * term;
        phase *= step;
    }
    GainProbe out;
    out.p = std::norm(q);
    out.dp = 2.0 * (std::conj(q) * dq).real();
    out.d2p = 2.0 * (std::norm(dq) + (std::conj(q) * d2q).real());
    return out;
}

} // namespace

BeamSearchResult best_single_beam_gain(const VecC& h, int grid_mult, int newton_iters) {
    if (h.size() == 0 || h.norm() == 0.0)
        throw InvalidInputError("best_single_beam_gain: zero channel");

    const int n = static_cast<int>(h.size());
    const int grid_size = grid_mult * n;
    // a(w)^H h over the grid equals the uniform-grid transform of conj(h).
    VecC spectrum = uniform_grid_transform(h.conjugate(), grid_size);

    int best_g = 0;
    double best_p = -1.0;
    for (int g = 0; g < grid_size; ++g) {
        double p = std::norm(spectrum[g]);
        if (p > best_p) {
            best_p = p;
            best_g = g;
        }
    }
    double omega = -kPi + kTwoPi * static_cast<double>(best_g) / grid_size;
    double p_cur = best_p;

    // Newton polish on |a(w)^H h|^2, accepting only improving steps.
    for (int it = 0; it < newton_iters; ++it) {
        GainProbe pr = probe_gain(h, omega);
        p_cur = pr.p;
        if (pr.d2p >= 0.0)
            break;
        double delta = pr.dp / pr.d2p;
        double trial = omega - delta;
        double p_trial = probe_gain(h, trial).p;
        int halvings = 0;
        while (p_trial <= p_cur && halvings < 8) {
            delta *= 0.5;
            trial = omega - delta;
            p_trial = probe_gain(h, trial).p;
            ++halvings;
        }
        if (p_trial <= p_cur)
            break;
        omega = trial;
        p_cur = p_trial;
        if (std::abs(delta) < 1e-15)
            break;
    }

    BeamSearchResult res;
    if (p_cur >= best_p) {
        res.omega_opt = wrap_spatial_freq(omega);
        res.gain_opt = std::sqrt(p_cur);
    } else {
        res.omega_opt = -kPi + kTwoPi * static_cast<double>(best_g) / grid_size;
        res.gain_opt = std::sqrt(best_p);
    }
    return res;
}

double beamforming_loss_db(const VecC& h, double omega_hat) {
    BeamSearchResult best = best_single_beam_gain(h);
    double g = beam_gain(h, omega_hat);
    if (g == 0.0)
        return std::numeric_limits<double>::infinity();
    double loss = 20.0 * std::log10(best.gain_opt / g);
    return loss < 0.0 ? 0.0 : loss;
}

double beamforming_loss_vs_mrt_db(const VecC& h, double omega_hat) {
    if (h.size() == 0 || h.norm() == 0.0)
        throw InvalidInputError("beamforming_loss_vs_mrt_db: zero channel");
    double g = beam_gain(h, omega_hat);
    if (g == 0.0)
        return std::numeric_limits<double>::infinity();
    double mrt = std::sqrt(static_cast<double>(h.size())) * h.norm();
    return 20.0 * std::log10(mrt / g);
}

double dirichlet_magnitude(int n_elements, double delta) {
    double d = std::remainder(delta, kTwoPi);
    double s = std::sin(0.5 * d);
    if (std::abs(s) < 1e-12) {
        // Near delta = 0 (mod 2*pi) the ratio tends to N.
        return static_cast<double>(n_elements);
    }
    return std::abs(std::sin(0.5 * n_elements * d) / s);
}

double single_path_loss_db(int n_elements, double delta) {
    double d = dirichlet_magnitude(n_elements, delta);
    if (d == 0.0)
        return std::numeric_limits<double>::infinity();
    double loss = 20.0 * std::log10(static_cast<double>(n_elements) / d);
    return loss < 0.0 ? 0.0 : loss;
}

} // namespace ncce
