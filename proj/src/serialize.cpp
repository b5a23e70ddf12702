#include "hexcross/serialize.hpp"

#include <algorithm>
#include <cstdio>
#include <regex>
#include <set>

#include "hexcross/errors.hpp"

namespace hexcross {

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

DomainPtr parse_domain(const std::string& spec) {
    static const std::regex hexagon(R"(hexagon:(\d+))"), box(R"((box|strip):(\d+)x(\d+))"),
        ann(R"(annulus:(\d+),(\d+))");
    std::smatch m;
    try {
        if (std::regex_match(spec, m, hexagon)) return build_regular_hexagon(std::stoi(m[1]));
        if (std::regex_match(spec, m, box)) {
            const int w = std::stoi(m[2]), h = std::stoi(m[3]);
            if (w < 1 || h < 1) throw ConfigError("box dimensions must be positive");
            return m[1] == "box" ? build_hex_box(w, h) : build_strip(w, h);
        }
        if (std::regex_match(spec, m, ann)) return annulus(std::stoi(m[1]), std::stoi(m[2]));
    } catch (const std::out_of_range&) {
        throw ConfigError("domain size out of range in '" + spec + "'");
    }
    throw ConfigError("unrecognised domain '" + spec + "' (hexagon:J, box:WxH, strip:TxL, annulus:J,D)");
}

std::string domain_spec(const HexDomain& d) {
    const auto& p = d.params();
    switch (d.kind()) {
        case DomainKind::RegularHexagon: return "hexagon:" + std::to_string(p.at(0));
        case DomainKind::HexBox: return "box:" + std::to_string(p.at(0)) + "x" + std::to_string(p.at(1));
        case DomainKind::Strip: return "strip:" + std::to_string(p.at(0)) + "x" + std::to_string(p.at(1));
        case DomainKind::Annulus: return "annulus:" + std::to_string(p.at(0)) + "," + std::to_string(p.at(1));
        case DomainKind::Union: return d.describe();
    }
    return d.describe();
}

json domain_to_json(const HexDomain& d) {
    json faces = json::array();
    for (FaceCoord f : d.faces()) faces.push_back({f.q, f.r});
    return {{"kind", to_string(d.kind())}, {"params", d.params()}, {"faces", faces}};
}

DomainPtr domain_from_json(const json& j) {
    try {
        const auto kind = j.at("kind").get<std::string>();
        const auto params = j.at("params").get<std::vector<int>>();
        std::vector<FaceCoord> faces;
        for (const auto& f : j.at("faces")) faces.push_back({f.at(0).get<int>(), f.at(1).get<int>()});

        DomainPtr d;
        auto need = [&](std::size_t n) {
            if (params.size() != n) throw ConfigError("domain '" + kind + "' has the wrong number of params");
        };
        if (kind == "hexagon") {
            need(1);
            d = build_regular_hexagon(params[0]);
        } else if (kind == "box") {
            need(2);
            d = build_hex_box(params[0], params[1]);
        } else if (kind == "strip") {
            need(2);
            d = build_strip(params[0], params[1]);
        } else if (kind == "annulus") {
            need(2);
            d = annulus(params[0], params[1]);
        } else if (kind == "union") {
            if (params.size() < 3 || params.size() % 2 == 0) throw ConfigError("union params are side, q, r, ...");
            std::vector<FaceCoord> centers;
            for (std::size_t i = 1; i + 1 < params.size(); i += 2) centers.push_back({params[i], params[i + 1]});
            d = translate_union(params[0], centers);
        } else {
            throw ConfigError("unknown domain kind '" + kind + "'");
        }
        if (faces.empty() || faces.size() != d->faces().size()) throw ConfigError("stored faces do not match the domain");
        const FaceCoord offset = faces.front() - d->faces().front();
        if (offset != FaceCoord{0, 0}) d = translate(*d, offset);
        if (!std::equal(faces.begin(), faces.end(), d->faces().begin())) throw ConfigError("stored faces do not match the domain");
        return d;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed domain JSON: ") + e.what());
    }
}

json config_to_json(const SpinConfig& c) {
    std::vector<int> spins;
    for (int i = 0; i < c.size(); ++i) spins.push_back(value(c.spin(i)));
    return {{"domain_hash", hex64(c.domain().hash())}, {"spins", spins}};
}

std::vector<Spin> config_from_json(const json& j, const HexDomain& d) {
    try {
        if (j.at("domain_hash").get<std::string>() != hex64(d.hash())) throw ConfigError("configuration belongs to another domain");
        const auto v = j.at("spins").get<std::vector<int>>();
        if (static_cast<int>(v.size()) != d.size()) throw ConfigError("configuration length does not match the domain");
        std::vector<Spin> out;
        for (int s : v) {
            if (s != 1 && s != -1) throw ConfigError("spins must be +1 or -1");
            out.push_back(spin_of(s));
        }
        return out;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed configuration JSON: ") + e.what());
    }
}

std::vector<std::uint8_t> config_to_binary(const SpinConfig& c) {
    std::vector<std::uint8_t> out{'H', 'X', 'C', '1'};
    const std::uint64_t h = c.domain().hash();
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(h >> (8 * i)));
    const auto n = static_cast<std::uint32_t>(c.size());
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(n >> (8 * i)));
    std::vector<std::uint8_t> bits((n + 7) / 8, 0);
    for (std::uint32_t i = 0; i < n; ++i)
        if (c.spin(static_cast<int>(i)) == Spin::plus) bits[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
    out.insert(out.end(), bits.begin(), bits.end());
    return out;
}

std::vector<Spin> config_from_binary(const std::vector<std::uint8_t>& b, const HexDomain& d) {
    if (b.size() < 16 || b[0] != 'H' || b[1] != 'X' || b[2] != 'C' || b[3] != '1') throw ConfigError("not a binary configuration");
    std::uint64_t h = 0;
    for (int i = 0; i < 8; ++i) h |= static_cast<std::uint64_t>(b[4 + static_cast<std::size_t>(i)]) << (8 * i);
    std::uint32_t n = 0;
    for (int i = 0; i < 4; ++i) n |= static_cast<std::uint32_t>(b[12 + static_cast<std::size_t>(i)]) << (8 * i);
    if (h != d.hash()) throw ConfigError("configuration belongs to another domain");
    if (static_cast<int>(n) != d.size() || b.size() != 16 + (n + 7) / 8) throw ConfigError("configuration length does not match");
    std::vector<Spin> out(n);
    for (std::uint32_t i = 0; i < n; ++i) out[i] = (b[16 + i / 8] >> (i % 8)) & 1u ? Spin::plus : Spin::minus;
    return out;
}

json event_to_json(const CrossingEvent& ev) {
    return {{"name", ev.name}, {"source", ev.source}, {"target", ev.target}, {"region", ev.region}, {"spin", value(ev.spin)}};
}

CrossingEvent event_from_json(const json& j) {
    try {
        CrossingEvent ev;
        ev.name = j.value("name", std::string{});
        ev.source = j.at("source").get<std::vector<int>>();
        ev.target = j.at("target").get<std::vector<int>>();
        ev.region = j.at("region").get<std::vector<int>>();
        const int s = j.at("spin").get<int>();
        if (s != 1 && s != -1) throw ConfigError("event spin must be +1 or -1");
        ev.spin = spin_of(s);
        return ev;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed event JSON: ") + e.what());
    }
}

json params_to_json(const ModelParams& p) { return {{"n", p.n}, {"x", p.x}, {"h", p.h}, {"h_prime", p.h_prime}}; }

json estimate_to_json(const Estimate& e) {
    std::vector<std::string> seeds;
    for (auto s : e.seeds) seeds.push_back(hex64(s));
    return {{"mean", e.mean},
            {"std_error", e.std_error},
            {"n_samples", e.n_samples},
            {"autocorrelation_time", e.autocorrelation_time},
            {"converged", e.converged},
            {"chain_means", e.chain_means},
            {"chain_errors", e.chain_errors},
            {"seeds", seeds}};
}

}  // namespace hexcross
