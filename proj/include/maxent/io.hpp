#pragma once

// File formats:
//   fimi      binary databases, one transaction per line, 0-based item ids
//   csv       dense numeric rows, no header
//   edgelist  "u v" or "u v w" per line, 0-based node ids, '#' comments;
//             undirected edges listed once. Files written here start with a
//             "# nodes N" comment that readers use as the node count.
//   margins   one target per line; row and column sections split by "---"
//   model / report   canonical JSON (sorted keys, 17 significant digits)

#include <iosfwd>
#include <string>
#include <string_view>

#include <json.hpp>

#include "maxent/assessment.hpp"
#include "maxent/matrix.hpp"
#include "maxent/model.hpp"
#include "maxent/solver.hpp"

namespace maxent {

enum class FileFormat { Fimi, Csv, EdgeList };

FileFormat parse_format(std::string_view s);
std::string_view to_string(FileFormat f);
std::string_view file_extension(FileFormat f);

/// What the reader needs to know beyond the file contents. Dimensions of zero
/// are inferred; larger inferred dimensions are an error.
struct MatrixLayout {
  Domain domain = Domain::Binary;
  StructureKind kind = StructureKind::Database;
  bool self_loops = false;
  std::size_t rows = 0;
  std::size_t cols = 0;
};

DataMatrix read_matrix(std::istream& in, FileFormat format, const MatrixLayout& layout);
DataMatrix read_matrix_file(const std::string& path, FileFormat format, const MatrixLayout& layout);
void write_matrix(std::ostream& out, const DataMatrix& data, FileFormat format);
void write_matrix_file(const std::string& path, const DataMatrix& data, FileFormat format);

/// A single section yields symmetric targets when `kind` is Undirected and
/// equal in/out targets for a directed network.
MarginTargets read_margins(std::istream& in, StructureKind kind);
MarginTargets read_margins_file(const std::string& path, StructureKind kind);
void write_margins(std::ostream& out, const MarginTargets& targets);

/// Sorted keys, doubles with 17 significant digits, no whitespace except a
/// trailing newline.
std::string canonical_dump(const nlohmann::json& j);

nlohmann::json model_to_json(const MaxEntModel& model);
MaxEntModel model_from_json(const nlohmann::json& j);
void save_model(const std::string& path, const MaxEntModel& model);
MaxEntModel load_model(const std::string& path);

nlohmann::json report_to_json(const AssessmentReport& report);

void write_trace_csv(std::ostream& out, const FitTrace& trace);

void write_text_file(const std::string& path, std::string_view contents);

}  // namespace maxent
