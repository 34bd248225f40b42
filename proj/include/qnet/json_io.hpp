#pragma once

#include <json.hpp>
#include <stdexcept>
#include <string>

#include "qnet/network.hpp"
#include "qnet/tail.hpp"

namespace qnet {

using OrderedJson = nlohmann::ordered_json;

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Network spec document: arrival_rate, routing ((m+1)x(m+1), row/col 0 =
/// outside), nodes ([{id, service:{kind,...}}] in id order), availability
/// ([{down:[ids], psi, phi}]). Numbers are decimal.
NetworkSpec parse_network_spec(const OrderedJson& doc);
NetworkSpec load_network_spec(const std::string& path);

/// Distribution document: {"pmf_prefix":[...], "tail":{"kind":"geometric",
/// "ratio":r}} (tail optional) or {"hazard":{"pattern":"example_4"}}.
DiscreteDist parse_distribution(const OrderedJson& doc);
DiscreteDist load_distribution(const std::string& path);

OrderedJson spec_to_json(const NetworkSpec& spec);

/// Deterministic serialization: insertion-ordered keys, floats at 12
/// significant digits, 2-space indent. Identical values yield identical bytes.
std::string dump_fixed(const OrderedJson& value, int indent = 2);

/// FNV-1a 64-bit digest of raw bytes, hex encoded (input fingerprinting).
std::string fnv1a_hex(const std::string& bytes);

std::string read_file(const std::string& path);

}  // namespace qnet
