#include "ergocap/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ergocap {

namespace {

std::string next_content_line(std::istream& is) {
  std::string line;
  while (std::getline(is, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') continue;
    auto last = line.find_last_not_of(" \t\r");
    return line.substr(first, last - first + 1);
  }
  throw Error("load: unexpected end of input");
}

// header form: "n=4"
int parse_header(std::istream& is, const std::string& expected_key) {
  std::string line = next_content_line(is);
  auto pos = line.find('=');
  if (pos == std::string::npos) throw Error("load: expected '" + expected_key + "=<int>' header");
  if (line.substr(0, pos) != expected_key)
    throw Error("load: expected header key '" + expected_key + "'");
  return std::stoi(line.substr(pos + 1));
}

}  // namespace

void save_capacity(std::ostream& os, const Capacity& nu) {
  os << "# capacity table\n";
  os << "n=" << nu.n() << "\n";
  for (std::uint32_t e = 0; e < nu.space().event_count(); ++e)
    os << Event(e, nu.n()).bits() << " " << rat_str(nu.at(e)) << "\n";
}

Capacity load_capacity(std::istream& is) {
  int n = parse_header(is, "n");
  FiniteSpace space(n);
  std::vector<Rat> values(space.event_count());
  std::vector<bool> seen(space.event_count(), false);
  for (std::uint32_t i = 0; i < space.event_count(); ++i) {
    std::istringstream ls(next_content_line(is));
    std::string bits, value;
    if (!(ls >> bits >> value)) throw Error("load_capacity: malformed event line");
    Event e = Event::from_bits(bits);
    if (e.n() != n) throw Error("load_capacity: event width differs from header");
    if (seen[e.mask()]) throw Error("load_capacity: duplicate event " + bits);
    seen[e.mask()] = true;
    values[e.mask()] = rat_parse(value);
  }
  return Capacity::from_values(space, std::move(values));
}

void save_map(std::ostream& os, const FiniteMap& tau) {
  os << "# finite map\n";
  os << "n=" << tau.n() << "\n";
  for (int p = 0; p < tau.n(); ++p) os << p << " -> " << tau.apply(p) << "\n";
}

FiniteMap load_map(std::istream& is) {
  int n = parse_header(is, "n");
  std::vector<int> table(static_cast<std::size_t>(n), -1);
  for (int i = 0; i < n; ++i) {
    std::istringstream ls(next_content_line(is));
    int from = 0, to = 0;
    std::string arrow;
    if (!(ls >> from >> arrow >> to) || arrow != "->")
      throw Error("load_map: malformed 'i -> j' line");
    if (from < 0 || from >= n) throw Error("load_map: point out of range");
    if (table[static_cast<std::size_t>(from)] != -1)
      throw Error("load_map: duplicate point " + std::to_string(from));
    table[static_cast<std::size_t>(from)] = to;
  }
  return FiniteMap::from_table(FiniteSpace(n), std::move(table));
}

void save_credal(std::ostream& os, const CredalSet& m) {
  os << "# credal set\n";
  os << "n=" << m.space().n() << "\n";
  os << "m=" << m.size() << "\n";
  for (const auto& p : m.members()) {
    for (int i = 0; i < m.space().n(); ++i) {
      if (i) os << " ";
      os << rat_str(p.mass(i));
    }
    os << "\n";
  }
}

void save_decomposition(std::ostream& os, const CycleDecomposition& dec) {
  os << "# cycle decomposition\n";
  os << "components=" << dec.components.size() << "\n";
  for (std::size_t i = 0; i < dec.components.size(); ++i) {
    const auto& c = dec.components[i];
    os << "component " << i << " points";
    for (int p : c.points) os << " " << p;
    os << "\n";
    os << "component " << i << " cycle";
    for (int p : c.cycle) os << " " << p;
    os << "\n";
  }
  os << "preperiod";
  for (int v : dec.preperiod) os << " " << v;
  os << "\n";
}

void save_measure_family(std::ostream& os, const InvariantMeasureFamily& fam) {
  os << "# ergodic measures, one per cycle\n";
  os << "m=" << fam.ergodic.size() << "\n";
  for (std::size_t i = 0; i < fam.ergodic.size(); ++i) {
    os << "measure " << i;
    for (const Rat& mass : fam.ergodic[i].masses()) os << " " << rat_str(mass);
    os << "\n";
  }
}

CredalSet load_credal(std::istream& is) {
  int n = parse_header(is, "n");
  int count = parse_header(is, "m");
  FiniteSpace space(n);
  std::vector<ProbabilityWeights> members;
  for (int i = 0; i < count; ++i) {
    std::istringstream ls(next_content_line(is));
    std::vector<Rat> masses;
    std::string tok;
    while (ls >> tok) masses.push_back(rat_parse(tok));
    if (static_cast<int>(masses.size()) != n)
      throw Error("load_credal: row has wrong length");
    members.push_back(ProbabilityWeights::from_masses(space, std::move(masses)));
  }
  return CredalSet(std::move(members));
}

namespace {

nlohmann::json capacity_to_json(const Capacity& nu) {
  nlohmann::json values = nlohmann::json::array();
  for (std::uint32_t e = 0; e < nu.space().event_count(); ++e)
    values.push_back(rat_str(nu.at(e)));
  return nlohmann::json{{"n", nu.n()}, {"values", values}};
}

Capacity capacity_from_json(const nlohmann::json& j) {
  FiniteSpace space(j.at("n").get<int>());
  std::vector<Rat> values;
  for (const auto& v : j.at("values")) values.push_back(rat_parse(v.get<std::string>()));
  return Capacity::from_values(space, std::move(values));
}

nlohmann::json credal_to_json(const CredalSet& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& p : m.members()) {
    nlohmann::json row = nlohmann::json::array();
    for (const Rat& x : p.masses()) row.push_back(rat_str(x));
    rows.push_back(row);
  }
  return nlohmann::json{{"n", m.space().n()}, {"members", rows}};
}

CredalSet credal_from_json(const nlohmann::json& j) {
  FiniteSpace space(j.at("n").get<int>());
  std::vector<ProbabilityWeights> members;
  for (const auto& row : j.at("members")) {
    std::vector<Rat> masses;
    for (const auto& v : row) masses.push_back(rat_parse(v.get<std::string>()));
    members.push_back(ProbabilityWeights::from_masses(space, std::move(masses)));
  }
  return CredalSet(std::move(members));
}

}  // namespace

void save_bundle(const std::filesystem::path& path, const InstanceBundle& bundle) {
  nlohmann::json j;
  j["version"] = 1;
  j["kind"] = "instance";
  j["id"] = bundle.id;
  j["capacity"] = capacity_to_json(bundle.nu);
  j["map"] = bundle.tau.table();
  if (bundle.presentation) j["credal"] = credal_to_json(*bundle.presentation);
  write_file_atomic(path, j.dump(2) + "\n");
}

InstanceBundle load_bundle(const std::filesystem::path& path) {
  nlohmann::json j = nlohmann::json::parse(read_file(path));
  if (!j.contains("version")) throw Error("bundle: missing version field");
  if (j.at("version").get<int>() != 1)
    throw Error("bundle: unsupported version " + j.at("version").dump());
  if (j.value("kind", "") != "instance")
    throw Error("bundle: not an instance file");
  Capacity nu = capacity_from_json(j.at("capacity"));
  std::vector<int> table = j.at("map").get<std::vector<int>>();
  FiniteMap tau = FiniteMap::from_table(nu.space(), std::move(table));
  std::optional<CredalSet> credal;
  if (j.contains("credal")) credal = credal_from_json(j.at("credal"));
  return InstanceBundle{j.value("id", ""), std::move(nu), std::move(tau), std::move(credal)};
}

Capacity load_capacity_file(const std::filesystem::path& path) {
  if (path.extension() == ".json") return load_bundle(path).nu;
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path.string());
  return load_capacity(is);
}

FiniteMap load_map_file(const std::filesystem::path& path) {
  if (path.extension() == ".json") return load_bundle(path).tau;
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path.string());
  return load_map(is);
}

CredalSet load_credal_file(const std::filesystem::path& path) {
  if (path.extension() == ".json") {
    auto bundle = load_bundle(path);
    if (!bundle.presentation) throw Error("bundle has no credal presentation");
    return *bundle.presentation;
  }
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path.string());
  return load_credal(is);
}

RecordWriter& RecordWriter::field(std::string key, std::string value) {
  for (char& c : value)
    if (c == ' ' || c == '\n' || c == '=') c = '_';
  fields_.emplace_back(std::move(key), std::move(value));
  return *this;
}

RecordWriter& RecordWriter::field(std::string key, const Rat& value) {
  return field(std::move(key), rat_str(value));
}

RecordWriter& RecordWriter::field(std::string key, long value) {
  return field(std::move(key), std::to_string(value));
}

RecordWriter& RecordWriter::field(std::string key, bool value) {
  return field(std::move(key), std::string(value ? "yes" : "no"));
}

std::string RecordWriter::line() const {
  std::string out;
  for (std::size_t i = 0; i < fields_.size(); ++i) {
    if (i) out += " ";
    out += fields_[i].first + "=" + fields_[i].second;
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot write " + tmp.string());
    os << content;
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace ergocap
