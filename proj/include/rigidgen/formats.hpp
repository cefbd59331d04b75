#ifndef RIGIDGEN_FORMATS_HPP
#define RIGIDGEN_FORMATS_HPP

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "rigidgen/design.hpp"
#include "rigidgen/oa.hpp"
#include "rigidgen/perm.hpp"

namespace rigidgen::formats {

/// Malformed header or row; line and column are 1-based (column 0 when unknown).
class ParseError : public PreconditionError {
public:
  ParseError(std::size_t line, std::size_t column, const std::string& message);

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

private:
  std::size_t line_;
  std::size_t column_;
};

struct OAFile {
  oa::OAParams params;
  std::vector<oa::OAElement> rows;
};

struct DesignFile {
  design::DesignParams params;
  std::vector<design::Block> blocks;
  /// Replication number as written in the header; recomputed on write.
  Rational lambda = 0;
};

struct PermFile {
  int n = 1;
  int t = 1;
  std::vector<perm::Perm> perms;
};

// Header `# oa q=<q> n=<n> t=<t> N=<rows>`, then n symbols in 1..q per row.
void write_oa(std::ostream& out, const OAFile& file);
OAFile read_oa(std::istream& in);

// Header `# design v=<v> k=<k> t=<t> N=<blocks> lambda=<lambda>`, then k sorted points per row.
void write_design(std::ostream& out, const DesignFile& file);
DesignFile read_design(std::istream& in);

// Header `# perm n=<n> t=<t> N=<count>`, then n images per row.
void write_perm(std::ostream& out, const PermFile& file);
PermFile read_perm(std::istream& in);

/// Returns "oa", "design" or "perm" from the header line without consuming the stream contents.
std::string sniff_family(const std::filesystem::path& path);

OAFile read_oa_file(const std::filesystem::path& path);
DesignFile read_design_file(const std::filesystem::path& path);
PermFile read_perm_file(const std::filesystem::path& path);
void write_oa_file(const std::filesystem::path& path, const OAFile& file);
void write_design_file(const std::filesystem::path& path, const DesignFile& file);
void write_perm_file(const std::filesystem::path& path, const PermFile& file);

}  // namespace rigidgen::formats

#endif
