#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "bmo/dyadic.hpp"

namespace bmo {

enum class RowKind { warmup, play };

/// One arm pull. Zooming episodes contribute M_d rows sharing t and cube
/// (the selected parent); warm-up rows carry t = 0 and the root cube.
struct TraceRow {
  RowKind kind = RowKind::play;
  std::int64_t t = 0;
  DyadicCube cube = DyadicCube::root(1);
  Point arm;
  double y = 0.0;
  /// Collection size and smallest cube measure after the row's step.
  std::size_t n_cubes = 0;
  double min_cube_measure = 1.0;
};

/// Rows in strict play order plus the terminal cubes at the end of the run.
struct RunTrace {
  std::string algo;
  std::size_t dim = 1;
  std::vector<TraceRow> rows;
  std::vector<DyadicCube> final_cubes;
  /// key=value provenance written as '#' comment lines ahead of the CSV.
  std::map<std::string, std::string> provenance;
};

/// CSV columns: kind,t,cube,arm,y,n_cubes,min_cube_measure. The cube address
/// is double-quoted because it contains commas. Arm coordinates
/// are ';'-separated and printed with 17 significant digits so traces
/// round-trip exactly. Final cubes follow as rows of kind "final".
void write_trace_csv(std::ostream& out, const RunTrace& trace);
/// Throws MalformedTrace with the offending line number.
RunTrace read_trace_csv(std::istream& in);

std::string format_double(double v);

}  // namespace bmo
