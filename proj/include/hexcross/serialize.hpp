#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hexcross/crossing.hpp"
#include "hexcross/hexlat.hpp"
#include "hexcross/model.hpp"
#include "hexcross/sampler.hpp"
#include "hexcross/spin_config.hpp"

namespace hexcross {

using json = nlohmann::ordered_json;

std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t v);

// hexagon:J | box:WxH | strip:TxL | annulus:J,D
DomainPtr parse_domain(const std::string& spec);
std::string domain_spec(const HexDomain& d);

// {kind, params, faces: [[q, r], ...]}
json domain_to_json(const HexDomain& d);
// Rebuilds from kind and params (translated copies allowed); throws ConfigError
// when the stored faces do not match.
DomainPtr domain_from_json(const json& j);

// {domain_hash, spins: [+-1 ...]} in face order.
json config_to_json(const SpinConfig& c);
std::vector<Spin> config_from_json(const json& j, const HexDomain& d);

// "HXC1", domain hash (u64 LE), face count (u32 LE), one bit per face (1 = +).
std::vector<std::uint8_t> config_to_binary(const SpinConfig& c);
std::vector<Spin> config_from_binary(const std::vector<std::uint8_t>& bytes, const HexDomain& d);

// {source, target, region, spin} as face-index lists.
json event_to_json(const CrossingEvent& ev);
CrossingEvent event_from_json(const json& j);

json params_to_json(const ModelParams& p);
json estimate_to_json(const Estimate& e);

}  // namespace hexcross
