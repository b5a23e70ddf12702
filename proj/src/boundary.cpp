#include "hexcross/boundary.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "hexcross/errors.hpp"

namespace hexcross {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

char spin_char(Spin s) { return s == Spin::plus ? '+' : '-'; }

}  // namespace

BoundaryCondition BoundaryCondition::push_mixed() {
    return mixed({{Arc::Left, Spin::plus}, {Arc::Top, Spin::plus}, {Arc::Right, Spin::plus}}, Spin::minus);
}

BoundaryCondition BoundaryCondition::push_mixed_dual() {
    return mixed({{Arc::Bottom, Spin::plus}}, Spin::minus);
}

std::vector<Spin> BoundaryCondition::resolve(const HexDomain& d) const {
    const auto m = static_cast<std::size_t>(d.exterior_size());
    return std::visit(
        overloaded{
            [&](const Free&) { return std::vector<Spin>(m, Spin::minus); },
            [&](const Wired&) { return std::vector<Spin>(m, Spin::plus); },
            [&](const Explicit& ex) {
                std::vector<Spin> out(m);
                for (std::size_t i = 0; i < m; ++i) {
                    const auto it = ex.spins.find(d.exterior()[i]);
                    if (it == ex.spins.end())
                        throw ConfigError("explicit boundary condition misses an exterior face");
                    out[i] = it->second;
                }
                if (ex.spins.size() != m)
                    throw ConfigError("explicit boundary condition has faces outside the exterior ring");
                return out;
            },
            [&](const Mixed& mx) {
                std::vector<Spin> out(m);
                for (std::size_t i = 0; i < m; ++i) {
                    const ArcMask tags = d.exterior_arcs(static_cast<int>(i));
                    bool tagged = false, any_plus = false;
                    for (const auto& [arc, s] : mx.arcs) {
                        if (tags & arc_bit(arc)) {
                            tagged = true;
                            any_plus = any_plus || s == Spin::plus;
                        }
                    }
                    out[i] = tagged ? (any_plus ? Spin::plus : Spin::minus) : mx.otherwise;
                }
                return out;
            },
            [&](const Dobrushin& db) {
                std::vector<Spin> out(m);
                const auto c = d.centroid();
                const double two_pi = 2.0 * std::numbers::pi;
                for (std::size_t i = 0; i < m; ++i) {
                    const auto p = face_center(d.exterior()[i]);
                    // Angle measured counterclockwise from the downward direction.
                    double a = std::atan2(p[1] - c[1], p[0] - c[0]) + std::numbers::pi / 2.0;
                    a = std::fmod(a + two_pi, two_pi) / two_pi;
                    const bool in = db.begin <= db.end ? (a >= db.begin && a < db.end)
                                                        : (a >= db.begin || a < db.end);
                    out[i] = in ? Spin::plus : Spin::minus;
                }
                return out;
            },
        },
        v_);
}

BoundaryCondition BoundaryCondition::flipped() const {
    return std::visit(
        overloaded{
            [](const Free&) { return wired(); },
            [](const Wired&) { return free(); },
            [](const Explicit& ex) {
                std::map<FaceCoord, Spin> s;
                for (const auto& [f, v] : ex.spins) s.emplace(f, opposite(v));
                return explicit_spins(std::move(s));
            },
            [](const Mixed& mx) {
                std::map<Arc, Spin> a;
                for (const auto& [arc, v] : mx.arcs) a.emplace(arc, opposite(v));
                return mixed(std::move(a), opposite(mx.otherwise));
            },
            [](const Dobrushin& db) { return dobrushin(db.end, db.begin); },
        },
        v_);
}

std::string BoundaryCondition::describe() const {
    return std::visit(
        overloaded{
            [](const Free&) { return std::string("free"); },
            [](const Wired&) { return std::string("wired"); },
            [](const Explicit& ex) {
                std::string s = "explicit:";
                for (const auto& [f, v] : ex.spins) s += spin_char(v);
                return s;
            },
            [](const Mixed& mx) {
                std::ostringstream os;
                os << "arcs:";
                bool first = true;
                for (const auto& [arc, v] : mx.arcs) {
                    os << (first ? "" : ",") << to_string(arc) << '=' << spin_char(v);
                    first = false;
                }
                os << (first ? "" : ",") << "else=" << spin_char(mx.otherwise);
                return os.str();
            },
            [](const Dobrushin& db) {
                std::ostringstream os;
                os << "dobrushin:" << db.begin << ',' << db.end;
                return os.str();
            },
        },
        v_);
}

bool boundary_leq(const HexDomain& domain, const BoundaryCondition& a, const BoundaryCondition& b) {
    const auto sa = a.resolve(domain), sb = b.resolve(domain);
    for (std::size_t i = 0; i < sa.size(); ++i)
        if (value(sa[i]) > value(sb[i])) return false;
    return true;
}

BoundaryCondition parse_boundary(const std::string& spec) {
    if (spec == "free") return BoundaryCondition::free();
    if (spec == "wired") return BoundaryCondition::wired();
    if (spec == "mixed") return BoundaryCondition::push_mixed();
    if (spec == "mixed-dual") return BoundaryCondition::push_mixed_dual();
    if (spec.rfind("dobrushin:", 0) == 0) {
        const auto body = spec.substr(10);
        const auto comma = body.find(',');
        if (comma == std::string::npos) throw ConfigError("dobrushin needs begin,end fractions");
        try {
            return BoundaryCondition::dobrushin(std::stod(body.substr(0, comma)), std::stod(body.substr(comma + 1)));
        } catch (const std::logic_error&) {
            throw ConfigError("malformed dobrushin fractions '" + body + "'");
        }
    }
    if (spec.rfind("arcs:", 0) == 0) {
        std::map<Arc, Spin> arcs;
        Spin otherwise = Spin::minus;
        std::istringstream is(spec.substr(5));
        std::string item;
        while (std::getline(is, item, ',')) {
            const auto eq = item.find('=');
            if (eq == std::string::npos || eq + 2 != item.size() || (item[eq + 1] != '+' && item[eq + 1] != '-'))
                throw ConfigError("arc assignment must look like left=+");
            const Spin s = item[eq + 1] == '+' ? Spin::plus : Spin::minus;
            const auto label = item.substr(0, eq);
            if (label == "else")
                otherwise = s;
            else
                arcs[arc_from_string(label)] = s;
        }
        return BoundaryCondition::mixed(std::move(arcs), otherwise);
    }
    throw ConfigError("unknown boundary condition '" + spec + "'");
}

}  // namespace hexcross
