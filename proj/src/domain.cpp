#include "hemi/domain.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "hemi/errors.hpp"

namespace hemi {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = 0.5 * std::numbers::pi;
constexpr double kHemisphereSlack = 1e-12;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
    std::istringstream in(text);
    double v = 0.0;
    if (!(in >> v)) throw InputError("domain spec: key '" + key + "' expects a number, got '" + text + "'");
    std::string rest;
    if (in >> rest) throw InputError("domain spec: trailing text for key '" + key + "'");
    return v;
}

std::vector<Vec2> parse_points(const std::string& key, const std::string& text) {
    std::vector<Vec2> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ';')) {
        item = trim(item);
        if (item.empty()) continue;
        std::istringstream pt(item);
        Vec2 v{};
        if (!(pt >> v[0] >> v[1])) throw InputError("domain spec: bad point '" + item + "' in key '" + key + "'");
        out.push_back(v);
    }
    return out;
}

double cross(const Vec2& a, const Vec2& b, const Vec2& c) {
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
}

bool segments_cross(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    const double d1 = cross(a, b, c);
    const double d2 = cross(a, b, d);
    const double d3 = cross(c, d, a);
    const double d4 = cross(c, d, b);
    return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

double signed_area(const std::vector<Vec2>& poly) {
    double a = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const auto& p = poly[i];
        const auto& q = poly[(i + 1) % poly.size()];
        a += p[0] * q[1] - q[0] * p[1];
    }
    return 0.5 * a;
}

void check_simple(const std::vector<Vec2>& poly, const std::string& what) {
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (j == i + 1 || (i == 0 && j == n - 1)) continue;
            if (segments_cross(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]))
                throw InputError(what + ": boundary is self-intersecting");
        }
    }
}

double perturbed_radius(const DomainSpec& spec, double phi) {
    double f = 1.0;
    for (std::size_t j = 0; j < spec.amplitudes.size(); ++j) f += spec.amplitudes[j] * std::cos((j + 1) * phi);
    return std::tan(0.5 * spec.gamma) * f;
}

double perturbed_radius_derivative(const DomainSpec& spec, double phi) {
    double f = 0.0;
    for (std::size_t j = 0; j < spec.amplitudes.size(); ++j)
        f -= spec.amplitudes[j] * (j + 1) * std::sin((j + 1) * phi);
    return std::tan(0.5 * spec.gamma) * f;
}

BoundaryCurve::Piece segment_piece(Vec2 a, Vec2 b) {
    BoundaryCurve::Piece p;
    p.point = [a, b](double t) { return Vec2{a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])}; };
    p.tangent = [a, b](double) { return Vec2{b[0] - a[0], b[1] - a[1]}; };
    p.straight = true;
    return p;
}

BoundaryCurve::Piece circle_piece(Vec2 c, double r) {
    BoundaryCurve::Piece p;
    p.point = [c, r](double t) {
        const double a = 2.0 * kPi * t;
        return Vec2{c[0] + r * std::cos(a), c[1] + r * std::sin(a)};
    };
    p.tangent = [r](double t) {
        const double a = 2.0 * kPi * t;
        return Vec2{-2.0 * kPi * r * std::sin(a), 2.0 * kPi * r * std::cos(a)};
    };
    return p;
}

}  // namespace

std::vector<Vec2> meridian_polyline(const DomainSpec& spec) {
    if (spec.kind == DomainKind::cap) return {{spec.gamma, 0.0}, {spec.gamma, kPi}};
    if (!spec.polyline.empty()) return spec.polyline;
    return barrel_polyline(spec.gamma, spec.bulge);
}

std::string to_string(DomainKind kind) {
    switch (kind) {
        case DomainKind::cap: return "cap";
        case DomainKind::disk_region: return "disk_region";
        case DomainKind::polygon_region: return "polygon_region";
        case DomainKind::perturbed_cap: return "perturbed_cap";
        case DomainKind::meridian_region: return "meridian_region";
    }
    return "unknown";
}

DomainKind domain_kind_from_string(const std::string& name) {
    if (name == "cap") return DomainKind::cap;
    if (name == "disk_region") return DomainKind::disk_region;
    if (name == "polygon_region") return DomainKind::polygon_region;
    if (name == "perturbed_cap") return DomainKind::perturbed_cap;
    if (name == "meridian_region") return DomainKind::meridian_region;
    throw InputError("domain spec: unknown kind '" + name + "'");
}

std::vector<Vec2> barrel_polyline(double gamma, double bulge, int segments) {
    std::vector<Vec2> out;
    out.reserve(segments + 1);
    for (int i = 0; i <= segments; ++i) {
        const double phi = kPi * i / segments;
        out.push_back({gamma * (1.0 + bulge * std::sin(phi)), phi});
    }
    out.back()[1] = kPi;
    return out;
}

void DomainSpec::validate() const {
    if (dim != 2 && dim != 3) throw InputError("domain spec: dim must be 2 or 3");
    switch (kind) {
        case DomainKind::cap:
            if (!(gamma > 0.0) || gamma > kHalfPi + kHemisphereSlack)
                throw InputError("cap: gamma must lie in (0, pi/2]");
            return;
        case DomainKind::disk_region:
            if (dim != 2) throw InputError("disk_region requires dim = 2");
            if (!(radius > 0.0)) throw InputError("disk_region: radius must be positive");
            if (std::hypot(center[0], center[1]) + radius > 1.0 + kHemisphereSlack)
                throw InputError("disk_region: region escapes the unit disk (hemisphere violation)");
            return;
        case DomainKind::polygon_region: {
            if (dim != 2) throw InputError("polygon_region requires dim = 2");
            if (vertices.size() < 3) throw InputError("polygon_region: need at least 3 vertices");
            for (const auto& v : vertices)
                if (std::hypot(v[0], v[1]) > 1.0 + kHemisphereSlack)
                    throw InputError("polygon_region: vertex outside the unit disk (hemisphere violation)");
            if (std::abs(signed_area(vertices)) < 1e-14) throw InputError("polygon_region: zero area");
            check_simple(vertices, "polygon_region");
            return;
        }
        case DomainKind::perturbed_cap: {
            if (dim != 2) throw InputError("perturbed_cap requires dim = 2");
            if (!(gamma > 0.0) || gamma > kHalfPi + kHemisphereSlack)
                throw InputError("perturbed_cap: gamma must lie in (0, pi/2]");
            double total = 0.0;
            for (double e : amplitudes) total += std::abs(e);
            if (total >= 0.3) throw InputError("perturbed_cap: sum of |eps_j| must stay below 0.3");
            for (int i = 0; i < 4096; ++i) {
                const double r = perturbed_radius(*this, 2.0 * kPi * i / 4096);
                if (r > 1.0 + kHemisphereSlack)
                    throw InputError("perturbed_cap: boundary escapes the unit disk (hemisphere violation)");
            }
            return;
        }
        case DomainKind::meridian_region: {
            if (dim != 3) throw InputError("meridian_region requires dim = 3");
            const auto poly = meridian_polyline(*this);
            if (poly.size() < 2) throw InputError("meridian_region: polyline needs at least 2 points");
            if (std::abs(poly.front()[1]) > 1e-12 || std::abs(poly.back()[1] - kPi) > 1e-12)
                throw InputError("meridian_region: polyline must run from phi = 0 to phi = pi");
            for (std::size_t i = 0; i < poly.size(); ++i) {
                if (!(poly[i][0] > 0.0) || poly[i][0] > kHalfPi + kHemisphereSlack)
                    throw InputError("meridian_region: theta must lie in (0, pi/2] (hemisphere violation)");
                if (i > 0 && !(poly[i][1] > poly[i - 1][1]))
                    throw InputError("meridian_region: phi must increase along the polyline");
            }
            return;
        }
    }
}

bool DomainSpec::is_geodesic_ball() const {
    switch (kind) {
        case DomainKind::cap:
        case DomainKind::disk_region: return true;
        case DomainKind::perturbed_cap:
            return std::all_of(amplitudes.begin(), amplitudes.end(), [](double e) { return e == 0.0; });
        case DomainKind::meridian_region: return polyline.empty() && bulge == 0.0;
        case DomainKind::polygon_region: return false;
    }
    return false;
}

void DomainSpec::set_parameter(const std::string& name, double value) {
    if (name == "gamma") gamma = value;
    else if (name == "radius") radius = value;
    else if (name == "center_x") center[0] = value;
    else if (name == "center_y") center[1] = value;
    else if (name == "bulge") bulge = value;
    else if (name.rfind("eps", 0) == 0 && name.size() > 3) {
        const int j = std::stoi(name.substr(3));
        if (j < 1) throw InputError("domain spec: eps index starts at 1");
        if (static_cast<int>(amplitudes.size()) < j) amplitudes.resize(j, 0.0);
        amplitudes[j - 1] = value;
    } else {
        throw InputError("domain spec: unknown scalar parameter '" + name + "'");
    }
}

DomainSpec parse_domain_spec(const std::string& text) {
    DomainSpec spec;
    bool have_kind = false;
    bool have_dim = false;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InputError("domain spec line " + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "kind") {
            spec.kind = domain_kind_from_string(value);
            have_kind = true;
        } else if (key == "dim") {
            spec.dim = static_cast<int>(parse_double(key, value));
            have_dim = true;
        } else if (key == "center") {
            auto pts = parse_points(key, value);
            if (pts.size() != 1) throw InputError("domain spec: center expects 'x y'");
            spec.center = pts.front();
        } else if (key == "vertices") {
            spec.vertices = parse_points(key, value);
        } else if (key == "polyline") {
            spec.polyline = parse_points(key, value);
        } else {
            spec.set_parameter(key, parse_double(key, value));
        }
    }
    if (!have_kind || !have_dim) throw InputError("domain spec: keys 'kind' and 'dim' are required");
    return spec;
}

DomainSpec load_domain_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open domain spec '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_domain_spec(buffer.str());
}

std::string format_domain_spec(const DomainSpec& spec) {
    std::ostringstream out;
    out << std::setprecision(17);
    out << "kind = " << to_string(spec.kind) << "\n";
    out << "dim = " << spec.dim << "\n";
    auto points = [&](const char* key, const std::vector<Vec2>& pts) {
        out << key << " =";
        for (std::size_t i = 0; i < pts.size(); ++i) out << (i ? "; " : " ") << pts[i][0] << " " << pts[i][1];
        out << "\n";
    };
    switch (spec.kind) {
        case DomainKind::cap: out << "gamma = " << spec.gamma << "\n"; break;
        case DomainKind::disk_region:
            out << "center = " << spec.center[0] << " " << spec.center[1] << "\n";
            out << "radius = " << spec.radius << "\n";
            break;
        case DomainKind::polygon_region: points("vertices", spec.vertices); break;
        case DomainKind::perturbed_cap:
            out << "gamma = " << spec.gamma << "\n";
            for (std::size_t j = 0; j < spec.amplitudes.size(); ++j)
                out << "eps" << j + 1 << " = " << spec.amplitudes[j] << "\n";
            break;
        case DomainKind::meridian_region:
            if (!spec.polyline.empty()) points("polyline", spec.polyline);
            else out << "gamma = " << spec.gamma << "\nbulge = " << spec.bulge << "\n";
            break;
    }
    return out.str();
}

BoundaryCurve::BoundaryCurve(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {
    if (pieces_.empty()) throw InputError("BoundaryCurve: no pieces");
}

double BoundaryCurve::wrap(double T) const {
    const double P = period();
    T = std::fmod(T, P);
    if (T < 0.0) T += P;
    return T;
}

Vec2 BoundaryCurve::point(double T) const {
    T = wrap(T);
    auto k = static_cast<std::size_t>(std::floor(T));
    if (k >= pieces_.size()) k = pieces_.size() - 1;
    return pieces_[k].point(T - static_cast<double>(k));
}

Vec2 BoundaryCurve::tangent(double T) const {
    T = wrap(T);
    auto k = static_cast<std::size_t>(std::floor(T));
    if (k >= pieces_.size()) k = pieces_.size() - 1;
    return pieces_[k].tangent(T - static_cast<double>(k));
}

double BoundaryCurve::parameter_midpoint(double Ta, double Tb) const {
    const double P = period();
    if (Tb - Ta > 0.5 * P) Tb -= P;
    else if (Ta - Tb > 0.5 * P) Tb += P;
    return wrap(0.5 * (Ta + Tb));
}

std::shared_ptr<const BoundaryCurve> make_boundary(const DomainSpec& spec) {
    spec.validate();
    std::vector<BoundaryCurve::Piece> pieces;
    if (spec.dim == 3) {
        const auto poly = meridian_polyline(spec);
        // (theta, phi) plane: bottom edge phi = 0, outer curve, top edge phi = pi, axis theta = 0
        pieces.push_back(segment_piece({0.0, 0.0}, poly.front()));
        for (std::size_t i = 0; i + 1 < poly.size(); ++i) pieces.push_back(segment_piece(poly[i], poly[i + 1]));
        pieces.push_back(segment_piece(poly.back(), {0.0, kPi}));
        pieces.push_back(segment_piece({0.0, kPi}, {0.0, 0.0}));
        return std::make_shared<const BoundaryCurve>(std::move(pieces));
    }
    switch (spec.kind) {
        case DomainKind::cap: pieces.push_back(circle_piece({0.0, 0.0}, std::tan(0.5 * spec.gamma))); break;
        case DomainKind::disk_region: pieces.push_back(circle_piece(spec.center, spec.radius)); break;
        case DomainKind::polygon_region: {
            auto verts = spec.vertices;
            if (signed_area(verts) < 0.0) std::reverse(verts.begin(), verts.end());
            for (std::size_t i = 0; i < verts.size(); ++i)
                pieces.push_back(segment_piece(verts[i], verts[(i + 1) % verts.size()]));
            break;
        }
        case DomainKind::perturbed_cap: {
            BoundaryCurve::Piece p;
            p.point = [spec](double t) {
                const double phi = 2.0 * kPi * t;
                const double r = perturbed_radius(spec, phi);
                return Vec2{r * std::cos(phi), r * std::sin(phi)};
            };
            p.tangent = [spec](double t) {
                const double phi = 2.0 * kPi * t;
                const double r = perturbed_radius(spec, phi);
                const double dr = perturbed_radius_derivative(spec, phi);
                return Vec2{2.0 * kPi * (dr * std::cos(phi) - r * std::sin(phi)),
                            2.0 * kPi * (dr * std::sin(phi) + r * std::cos(phi))};
            };
            pieces.push_back(std::move(p));
            break;
        }
        case DomainKind::meridian_region: throw InputError("meridian_region requires dim = 3");
    }
    return std::make_shared<const BoundaryCurve>(std::move(pieces));
}

double meridian_profile(const DomainSpec& spec, double phi) {
    const auto poly = meridian_polyline(spec);
    if (phi <= poly.front()[1]) return poly.front()[0];
    for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
        if (phi <= poly[i + 1][1]) {
            const double t = (phi - poly[i][1]) / (poly[i + 1][1] - poly[i][1]);
            return poly[i][0] + t * (poly[i + 1][0] - poly[i][0]);
        }
    }
    return poly.back()[0];
}

}  // namespace hemi
