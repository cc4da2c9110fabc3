#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "tpass/error.hpp"
#include "tpass/params.hpp"

namespace tpass {

using cplx = std::complex<double>;

struct Point3
{
    double x = 0, y = 0, z = 0;
};

inline double distance(const Point3& a, const Point3& b)
{
    return std::hypot(a.x - b.x, a.y - b.y, a.z - b.z);
}

/// Wireless UEs sit on the ground plane.
inline Point3 ue_at(double x, double y) { return {x, y, 0.0}; }

/// Point on the waveguide at abscissa x.
inline Point3 waveguide_point(double x, const SystemParams& p) { return {x, 0.0, p.height}; }

/// Pinching-antenna layout along the waveguide for one slot.
struct PaConfig
{
    std::vector<double> positions;
    std::vector<double> radiation;

    std::size_t size() const { return positions.size(); }
};

struct EffectiveChannel
{
    cplx coeff;
    double gain;
};

inline EffectiveChannel make_channel(cplx h) { return {h, std::norm(h)}; }

/// Empty string when `pa` satisfies ordering, bounds, spacing and radiation
/// range; otherwise the first violated condition.
inline std::string check_pa(const PaConfig& pa, const SystemParams& p, const DerivedConstants& c)
{
    if (pa.positions.size() != pa.radiation.size()) return "positions/radiation size mismatch";
    if (pa.positions.empty()) return "no pinching antennas";
    const double spacing = min_spacing(p, c);
    const double lo = p.feed_x, hi = p.feed_x + p.region_x;
    for (std::size_t n = 0; n < pa.size(); ++n) {
        if (pa.positions[n] < lo || pa.positions[n] > hi) return "position outside waveguide";
        if (!(pa.radiation[n] >= 0.0 && pa.radiation[n] <= 1.0)) return "radiation outside [0,1]";
        if (n > 0) {
            if (!(pa.positions[n] > pa.positions[n - 1])) return "positions not strictly increasing";
            // 1e-12 m slack absorbs rounding on grids built as multiples of the spacing
            if (pa.positions[n] - pa.positions[n - 1] < spacing - 1e-12) return "spacing below minimum";
        }
    }
    return {};
}

/// In-waveguide propagation over `length` meters.
inline cplx waveguide_coeff(double length, const DerivedConstants& c, const SystemParams& p)
{
    const double mag = std::pow(10.0, -p.attenuation_db_per_m * length / 20.0);
    const double phase = -2.0 * std::numbers::pi / c.guided_wavelength * length;
    return std::polar(mag, phase);
}

inline cplx waveguide_coeff(double x_from, double x_to, const DerivedConstants& c, const SystemParams& p)
{
    return waveguide_coeff(std::abs(x_to - x_from), c, p);
}

inline cplx freespace_coeff(const Point3& ue, const Point3& pa, const DerivedConstants& c)
{
    const double r = distance(ue, pa);
    if (r < 1e-9) throw Error(ErrorKind::degenerate_geometry, "UE coincides with a pinching antenna");
    return std::polar(std::sqrt(c.eta) / r, -c.wavenumber * r);
}

/// Path term of a PA at abscissa x towards `ue`: free-space times in-waveguide
/// coefficient from the feed, without any radiation factor.
inline cplx pa_path_term(const Point3& ue, double x, const DerivedConstants& c, const SystemParams& p)
{
    return freespace_coeff(ue, waveguide_point(x, p), c) * waveguide_coeff(p.feed_x, x, c, p);
}

/// Coherent sum over PAs ordered along the waveguide, each radiating its
/// fraction of the power that survived the PAs before it.
inline cplx combine_wireless(std::span<const cplx> path_terms, std::span<const double> radiation)
{
    cplx h{0.0, 0.0};
    double residual = 1.0; // amplitude that is still guided
    for (std::size_t n = 0; n < path_terms.size(); ++n) {
        h += path_terms[n] * (std::sqrt(radiation[n]) * residual);
        residual *= std::sqrt(1.0 - radiation[n]);
    }
    return h;
}

inline EffectiveChannel effective_wireless(const Point3& ue, const PaConfig& pa,
                                           const DerivedConstants& c, const SystemParams& p)
{
    std::vector<cplx> terms(pa.size());
    for (std::size_t n = 0; n < pa.size(); ++n) terms[n] = pa_path_term(ue, pa.positions[n], c, p);
    return make_channel(combine_wireless(terms, pa.radiation));
}

inline cplx wired_coeff(std::span<const double> radiation, const DerivedConstants& c, const SystemParams& p)
{
    double residual = 1.0;
    for (double d : radiation) residual *= std::sqrt(1.0 - d);
    return p.coupler_efficiency * waveguide_coeff(p.region_x, c, p) * residual;
}

/// Residual guided signal delivered through the termination coupler.
/// Independent of the PA positions.
inline EffectiveChannel effective_wired(const PaConfig& pa, const DerivedConstants& c, const SystemParams& p)
{
    return make_channel(wired_coeff(pa.radiation, c, p));
}

} // namespace tpass
