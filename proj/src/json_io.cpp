#include "qnet/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace qnet {

namespace {

double require_number(const OrderedJson& doc, const std::string& key) {
  if (!doc.contains(key) || !doc[key].is_number()) {
    throw ParseError("missing or non-numeric field '" + key + "'");
  }
  return doc[key].get<double>();
}

RateFunction parse_service(const OrderedJson& svc) {
  if (!svc.contains("kind") || !svc["kind"].is_string()) {
    throw ParseError("service needs a string 'kind'");
  }
  const std::string kind = svc["kind"].get<std::string>();
  if (kind == "constant") {
    return RateFunction::constant(require_number(svc, "mu"));
  }
  if (kind == "table_with_tail") {
    if (!svc.contains("values") || !svc["values"].is_array()) {
      throw ParseError("table_with_tail needs an array 'values'");
    }
    std::vector<double> values;
    for (const auto& v : svc["values"]) {
      if (!v.is_number()) throw ParseError("table values must be numbers");
      values.push_back(v.get<double>());
    }
    return RateFunction::table_with_tail(std::move(values), require_number(svc, "tail"));
  }
  if (kind == "geometric_approach") {
    return RateFunction::geometric_approach(require_number(svc, "a"),
                                            require_number(svc, "b"),
                                            require_number(svc, "ratio"));
  }
  throw ParseError("unknown service kind '" + kind + "'");
}

}  // namespace

NetworkSpec parse_network_spec(const OrderedJson& doc) {
  if (!doc.is_object()) throw ParseError("spec document must be an object");

  if (!doc.contains("routing") || !doc["routing"].is_array()) {
    throw ParseError("missing 'routing' matrix");
  }
  const auto& rows = doc["routing"];
  const auto size = rows.size();
  Eigen::MatrixXd r(size, size);
  for (std::size_t i = 0; i < size; ++i) {
    if (!rows[i].is_array() || rows[i].size() != size) {
      throw ParseError("routing must be a square array of arrays");
    }
    for (std::size_t j = 0; j < size; ++j) {
      if (!rows[i][j].is_number()) throw ParseError("routing entries must be numbers");
      r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j].get<double>();
    }
  }

  if (!doc.contains("nodes") || !doc["nodes"].is_array()) {
    throw ParseError("missing 'nodes' array");
  }
  std::vector<RateFunction> services;
  int expect_id = 1;
  for (const auto& node : doc["nodes"]) {
    if (!node.contains("id") || !node["id"].is_number_integer() ||
        node["id"].get<int>() != expect_id) {
      throw ParseError("nodes must carry ids 1..m in order");
    }
    if (!node.contains("service")) throw ParseError("node needs a 'service'");
    services.push_back(parse_service(node["service"]));
    ++expect_id;
  }
  if (services.size() + 1 != size) {
    throw ParseError("routing dimension must be node count + 1");
  }

  std::vector<AvailabilityEntry> avail;
  if (doc.contains("availability")) {
    if (!doc["availability"].is_array()) throw ParseError("'availability' must be an array");
    for (const auto& entry : doc["availability"]) {
      if (!entry.contains("down") || !entry["down"].is_array()) {
        throw ParseError("availability entry needs a 'down' array");
      }
      DownSet mask = 0;
      for (const auto& id : entry["down"]) {
        if (!id.is_number_integer()) throw ParseError("'down' ids must be integers");
        const int node = id.get<int>();
        if (node < 1 || node > static_cast<int>(services.size())) {
          throw ParseError("'down' id out of range");
        }
        mask |= 1u << (node - 1);
      }
      avail.push_back(AvailabilityEntry{mask, require_number(entry, "psi"),
                                        require_number(entry, "phi")});
    }
  } else {
    avail.push_back(AvailabilityEntry{0, 1.0, 1.0});
  }

  return NetworkSpec{require_number(doc, "arrival_rate"), RoutingMatrix(std::move(r)),
                     std::move(services), AvailabilityModel(std::move(avail))};
}

NetworkSpec load_network_spec(const std::string& path) {
  OrderedJson doc;
  try {
    doc = OrderedJson::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  return parse_network_spec(doc);
}

DiscreteDist parse_distribution(const OrderedJson& doc) {
  if (doc.contains("hazard")) {
    const auto& hz = doc["hazard"];
    if (!hz.contains("pattern") || !hz["pattern"].is_string()) {
      throw ParseError("hazard distribution needs a 'pattern'");
    }
    const std::string pattern = hz["pattern"].get<std::string>();
    if (pattern == "example_4") return DiscreteDist::example4();
    throw ParseError("unknown hazard pattern '" + pattern + "'");
  }
  if (!doc.contains("pmf_prefix") || !doc["pmf_prefix"].is_array()) {
    throw ParseError("distribution needs 'pmf_prefix' or 'hazard'");
  }
  std::vector<double> pmf;
  for (const auto& v : doc["pmf_prefix"]) {
    if (!v.is_number()) throw ParseError("pmf values must be numbers");
    pmf.push_back(v.get<double>());
  }
  std::optional<double> ratio;
  if (doc.contains("tail")) {
    const auto& tail = doc["tail"];
    if (!tail.contains("kind") || tail["kind"].get<std::string>() != "geometric") {
      throw ParseError("only geometric tails are supported");
    }
    ratio = require_number(tail, "ratio");
  }
  return DiscreteDist::from_pmf_prefix(std::move(pmf), ratio);
}

DiscreteDist load_distribution(const std::string& path) {
  OrderedJson doc;
  try {
    doc = OrderedJson::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  return parse_distribution(doc);
}

OrderedJson spec_to_json(const NetworkSpec& spec) {
  OrderedJson doc;
  doc["arrival_rate"] = spec.arrival_rate;
  OrderedJson rows = OrderedJson::array();
  for (int i = 0; i <= spec.nodes(); ++i) {
    OrderedJson row = OrderedJson::array();
    for (int j = 0; j <= spec.nodes(); ++j) row.push_back(spec.routing(i, j));
    rows.push_back(row);
  }
  doc["routing"] = rows;
  OrderedJson nodes = OrderedJson::array();
  for (int i = 1; i <= spec.nodes(); ++i) {
    const auto& svc = spec.services[i - 1];
    OrderedJson service;
    service["kind"] = std::string(to_string(svc.kind()));
    switch (svc.kind()) {
      case RateFunction::Kind::constant:
        service["mu"] = svc.constant_mu();
        break;
      case RateFunction::Kind::table_with_tail:
        service["values"] = svc.table_values();
        service["tail"] = svc.table_tail();
        break;
      case RateFunction::Kind::geometric_approach:
        service["a"] = svc.geo_a();
        service["b"] = svc.geo_b();
        service["ratio"] = svc.geo_ratio();
        break;
    }
    nodes.push_back(OrderedJson{{"id", i}, {"service", service}});
  }
  doc["nodes"] = nodes;
  OrderedJson avail = OrderedJson::array();
  for (const auto& entry : spec.availability.entries()) {
    OrderedJson down = OrderedJson::array();
    for (int node = 1; node <= spec.nodes(); ++node) {
      if (down_contains(entry.down, node)) down.push_back(node);
    }
    avail.push_back(OrderedJson{{"down", down}, {"psi", entry.psi}, {"phi", entry.phi}});
  }
  doc["availability"] = avail;
  return doc;
}

// ---------------------------------------------------------------------------
// Deterministic dumping
// ---------------------------------------------------------------------------

namespace {

void format_number(std::string& out, double v) {
  if (std::isnan(v)) {
    out += "null";
    return;
  }
  if (std::isinf(v)) {
    out += v > 0 ? "1e999" : "-1e999";  // not representable; flagged value
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  out += buf;
  // bare integers like "4" stay valid JSON either way
}

void dump_value(std::string& out, const OrderedJson& v, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent) * (depth + 1), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent) * depth, ' ');
  switch (v.type()) {
    case nlohmann::json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        out += OrderedJson(it.key()).dump();
        out += ": ";
        dump_value(out, it.value(), indent, depth + 1);
      }
      out += "\n" + close_pad + "}";
      return;
    }
    case nlohmann::json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& item : v) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        dump_value(out, item, indent, depth + 1);
      }
      out += "\n" + close_pad + "]";
      return;
    }
    case nlohmann::json::value_t::number_float:
      format_number(out, v.get<double>());
      return;
    default:
      out += v.dump();
      return;
  }
}

}  // namespace

std::string dump_fixed(const OrderedJson& value, int indent) {
  std::string out;
  dump_value(out, value, indent, 0);
  out += "\n";
  return out;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace qnet
