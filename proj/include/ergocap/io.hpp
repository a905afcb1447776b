#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "ergocap/dynamics.hpp"

namespace ergocap {

/// Text-table round trips are bit-exact: one line per event ("bits p/q"),
/// one "i -> j" line per point, one row of masses per credal member.

void save_capacity(std::ostream& os, const Capacity& nu);
Capacity load_capacity(std::istream& is);

void save_map(std::ostream& os, const FiniteMap& tau);
FiniteMap load_map(std::istream& is);

void save_credal(std::ostream& os, const CredalSet& m);
CredalSet load_credal(std::istream& is);

/// Labeled text table of components, cycles and pre-periods.
void save_decomposition(std::ostream& os, const CycleDecomposition& dec);
/// Labeled text table of the ergodic measures, one mass row per cycle.
void save_measure_family(std::ostream& os, const InvariantMeasureFamily& fam);

/// A self-contained instance bundle: capacity, map, optional presentation.
struct InstanceBundle {
  std::string id;
  Capacity nu;
  FiniteMap tau;
  std::optional<CredalSet> presentation;
};

/// JSON bundle with an explicit "version" field; unknown versions are
/// rejected with Error.
void save_bundle(const std::filesystem::path& path, const InstanceBundle& bundle);
InstanceBundle load_bundle(const std::filesystem::path& path);

/// Dispatch by extension: .cap / .map / .cred / .json.
Capacity load_capacity_file(const std::filesystem::path& path);
FiniteMap load_map_file(const std::filesystem::path& path);
CredalSet load_credal_file(const std::filesystem::path& path);

/// Line-oriented machine records: ordered key=value pairs, one record per
/// line. Values must not contain spaces or newlines.
class RecordWriter {
 public:
  RecordWriter& field(std::string key, std::string value);
  RecordWriter& field(std::string key, const Rat& value);
  RecordWriter& field(std::string key, long value);
  RecordWriter& field(std::string key, bool value);
  std::string line() const;

 private:
  std::vector<std::pair<std::string, std::string>> fields_;
};

/// Writes content to path atomically (temp file + rename).
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

}  // namespace ergocap
