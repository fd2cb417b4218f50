#pragma once

// Declarative hemisphere domains and their exact boundary curves.
//
// dim 2 domains live in the stereographic chart (the hemisphere is the unit
// disk). dim 3 domains are domains of revolution described by their meridian
// cross-section in (theta, phi) coordinates, theta along the first axis.

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace hemi {

using Vec2 = std::array<double, 2>;

enum class DomainKind { cap, disk_region, polygon_region, perturbed_cap, meridian_region };

std::string to_string(DomainKind kind);
DomainKind domain_kind_from_string(const std::string& name);

struct DomainSpec {
    DomainKind kind = DomainKind::cap;
    int dim = 2;
    double gamma = 0.0;                  ///< cap, perturbed_cap, barrel meridian regions
    Vec2 center{0.0, 0.0};               ///< disk_region (chart)
    double radius = 0.0;                 ///< disk_region (chart)
    std::vector<Vec2> vertices;          ///< polygon_region (chart)
    std::vector<double> amplitudes;      ///< perturbed_cap: eps_1, eps_2, ...
    /// meridian_region: outer curve theta = Gamma(phi) as (theta, phi) pairs, phi from 0 to pi.
    std::vector<Vec2> polyline;
    double bulge = 0.0;                  ///< meridian_region without polyline: barrel amplitude

    /// Throws InputError when the description is not an admissible hemisphere domain.
    void validate() const;
    /// True for descriptions that are geodesic balls (caps and chart disks).
    bool is_geodesic_ball() const;
    /// Scalar parameter by name: gamma, radius, center_x, center_y, eps<j>, bulge.
    void set_parameter(const std::string& name, double value);
};

/// Parses the `key = value` format. Keys: kind, dim, gamma, center = "x y",
/// radius, vertices = "x y; x y; ...", eps1, eps2, ..., polyline = "theta phi; ...",
/// bulge (meridian barrel: Gamma(phi) = gamma (1 + bulge sin phi)). `#` starts a comment.
DomainSpec parse_domain_spec(const std::string& text);
DomainSpec load_domain_spec(const std::string& path);
std::string format_domain_spec(const DomainSpec& spec);

/// Samples Gamma(phi) = gamma (1 + bulge sin phi) into a meridian polyline.
std::vector<Vec2> barrel_polyline(double gamma, double bulge, int segments = 64);

/// Closed, counter-clockwise, piecewise-smooth boundary curve. Piece k is
/// parametrized by T in [k, k+1]; the full period is the number of pieces.
class BoundaryCurve {
public:
    struct Piece {
        std::function<Vec2(double)> point;    ///< t in [0, 1]
        std::function<Vec2(double)> tangent;  ///< d point / dt
        bool straight = false;
    };

    explicit BoundaryCurve(std::vector<Piece> pieces);

    double period() const { return static_cast<double>(pieces_.size()); }
    std::size_t piece_count() const { return pieces_.size(); }
    const Piece& piece(std::size_t k) const { return pieces_[k]; }

    Vec2 point(double T) const;
    Vec2 tangent(double T) const;
    /// Midpoint in parameter between two parameters on the same or adjacent pieces.
    double parameter_midpoint(double Ta, double Tb) const;
    double wrap(double T) const;

private:
    std::vector<Piece> pieces_;
};

std::shared_ptr<const BoundaryCurve> make_boundary(const DomainSpec& spec);

/// Outer meridian curve of a dim 3 domain (caps give a constant theta = gamma).
std::vector<Vec2> meridian_polyline(const DomainSpec& spec);

/// Gamma(phi) for a meridian region (piecewise linear through the polyline, or gamma for caps).
double meridian_profile(const DomainSpec& spec, double phi);

}  // namespace hemi
