#include "rigidgen/formats.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>

namespace rigidgen::formats {

namespace {

struct Token {
  std::string_view text;
  std::size_t column;
};

std::vector<Token> tokenize(std::string_view line)
{
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) tokens.push_back({line.substr(start, i - start), start + 1});
  }
  return tokens;
}

bool blank(std::string_view line)
{
  return tokenize(line).empty();
}

std::int64_t parse_integer(const Token& token, std::size_t line)
{
  std::int64_t value = 0;
  const char* first = token.text.data();
  const char* last = first + token.text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last)
    throw ParseError(line, token.column, "expected an integer, found '" + std::string(token.text) + "'");
  return value;
}

Rational parse_rational(const Token& token, std::size_t line)
{
  const auto slash = token.text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_integer(token, line));
  const Token num{token.text.substr(0, slash), token.column};
  const Token den{token.text.substr(slash + 1), token.column + slash + 1};
  const std::int64_t d = parse_integer(den, line);
  if (d == 0) throw ParseError(line, den.column, "zero denominator");
  return Rational(parse_integer(num, line), d);
}

// Line-numbered reader over non-blank lines.
class LineReader {
public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::string& line)
  {
    while (std::getline(in_, line)) {
      ++number_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!blank(line)) return true;
    }
    return false;
  }

  std::size_t number() const { return number_; }

private:
  std::istream& in_;
  std::size_t number_ = 0;
};

struct Header {
  std::size_t line = 0;
  std::map<std::string, Token> fields;
  std::string storage;
};

// Parses `# <family> key=value ...`; every key in `keys` must appear exactly once.
Header read_header(LineReader& reader, const std::string& family, const std::vector<std::string>& keys)
{
  Header header;
  if (!reader.next(header.storage)) throw ParseError(1, 0, "missing '# " + family + "' header");
  header.line = reader.number();
  const auto tokens = tokenize(header.storage);
  if (tokens.size() < 2 || tokens[0].text != "#" || tokens[1].text != family)
    throw ParseError(header.line, 1, "expected header '# " + family + " ...'");
  for (std::size_t i = 2; i < tokens.size(); ++i) {
    const auto eq = tokens[i].text.find('=');
    if (eq == std::string_view::npos || eq == 0)
      throw ParseError(header.line, tokens[i].column, "expected key=value, found '" + std::string(tokens[i].text) + "'");
    const std::string key(tokens[i].text.substr(0, eq));
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      throw ParseError(header.line, tokens[i].column, "unknown header field '" + key + "'");
    if (header.fields.count(key)) throw ParseError(header.line, tokens[i].column, "duplicate header field '" + key + "'");
    header.fields.emplace(key, Token{tokens[i].text.substr(eq + 1), tokens[i].column + eq + 1});
  }
  for (const auto& key : keys)
    if (!header.fields.count(key)) throw ParseError(header.line, 0, "header is missing '" + key + "='");
  return header;
}

int header_int(const Header& header, const std::string& key, std::int64_t lo, std::int64_t hi)
{
  const Token& token = header.fields.at(key);
  const std::int64_t value = parse_integer(token, header.line);
  if (value < lo || value > hi)
    throw ParseError(header.line, token.column,
                     key + "=" + std::to_string(value) + " is outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return static_cast<int>(value);
}

template <class Validate>
void validate_header(const Header& header, Validate&& validate)
{
  try {
    validate();
  } catch (const std::exception& error) {
    throw ParseError(header.line, 0, error.what());
  }
}

// Reads rows of exactly `width` integers in [1, max_value]; checks the row count against N.
template <class Row>
void read_rows(LineReader& reader, std::size_t width, int max_value, std::uint64_t expected, Row&& on_row)
{
  std::string line;
  std::uint64_t count = 0;
  while (reader.next(line)) {
    const auto tokens = tokenize(line);
    if (tokens[0].text.starts_with("#")) continue;
    if (tokens.size() != width)
      throw ParseError(reader.number(), tokens.size() > width ? tokens[width].column : 0,
                       "expected " + std::to_string(width) + " entries, found " + std::to_string(tokens.size()));
    std::vector<int> values;
    std::vector<std::size_t> columns;
    for (const auto& token : tokens) {
      const std::int64_t value = parse_integer(token, reader.number());
      if (value < 1 || value > max_value)
        throw ParseError(reader.number(), token.column,
                         "value " + std::to_string(value) + " is outside 1.." + std::to_string(max_value));
      values.push_back(static_cast<int>(value));
      columns.push_back(token.column);
    }
    on_row(reader.number(), values, columns);
    ++count;
  }
  if (count != expected)
    throw ParseError(reader.number(), 0,
                     "header declares N=" + std::to_string(expected) + " but found " + std::to_string(count) + " rows");
}

void write_row(std::ostream& out, const std::vector<int>& values)
{
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out << ' ';
    out << values[i];
  }
  out << '\n';
}

std::ifstream open_input(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open '" + path.string() + "'");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path)
{
  std::ofstream out(path);
  if (!out) throw PreconditionError("cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& message)
    : PreconditionError("line " + std::to_string(line) + (column ? ", column " + std::to_string(column) : std::string()) +
                        ": " + message),
      line_(line), column_(column)
{
}

void write_oa(std::ostream& out, const OAFile& file)
{
  const auto& p = file.params;
  out << "# oa q=" << p.q << " n=" << p.n << " t=" << p.t << " N=" << file.rows.size() << '\n';
  for (const auto& row : file.rows) write_row(out, row.symbols);
}

OAFile read_oa(std::istream& in)
{
  LineReader reader(in);
  const Header header = read_header(reader, "oa", {"q", "n", "t", "N"});
  OAFile file;
  file.params.q = header_int(header, "q", 2, 1 << 20);
  file.params.n = header_int(header, "n", 1, 1 << 20);
  file.params.t = header_int(header, "t", 1, 1 << 20);
  const auto rows = static_cast<std::uint64_t>(header_int(header, "N", 0, INT32_MAX));
  validate_header(header, [&] { oa::validate(file.params); });
  read_rows(reader, static_cast<std::size_t>(file.params.n), file.params.q, rows,
            [&](std::size_t, const std::vector<int>& values, const std::vector<std::size_t>&) {
              file.rows.push_back(oa::OAElement{values});
            });
  return file;
}

void write_design(std::ostream& out, const DesignFile& file)
{
  const auto& p = file.params;
  const auto report = design::verify_design(file.blocks, p);
  out << "# design v=" << p.v << " k=" << p.k << " t=" << p.t << " N=" << file.blocks.size()
      << " lambda=" << to_string(report.lambda) << '\n';
  for (const auto& block : file.blocks) write_row(out, block.points);
}

DesignFile read_design(std::istream& in)
{
  LineReader reader(in);
  const Header header = read_header(reader, "design", {"v", "k", "t", "N", "lambda"});
  DesignFile file;
  file.params.v = header_int(header, "v", 1, 64);
  file.params.k = header_int(header, "k", 1, 64);
  file.params.t = header_int(header, "t", 1, 64);
  const auto blocks = static_cast<std::uint64_t>(header_int(header, "N", 0, INT32_MAX));
  file.lambda = parse_rational(header.fields.at("lambda"), header.line);
  validate_header(header, [&] { design::validate(file.params); });
  read_rows(reader, static_cast<std::size_t>(file.params.k), file.params.v, blocks,
            [&](std::size_t line, const std::vector<int>& values, const std::vector<std::size_t>& columns) {
              for (std::size_t i = 1; i < values.size(); ++i)
                if (values[i] <= values[i - 1])
                  throw ParseError(line, columns[i], "block points must be strictly increasing");
              file.blocks.push_back(design::Block{values});
            });
  return file;
}

void write_perm(std::ostream& out, const PermFile& file)
{
  out << "# perm n=" << file.n << " t=" << file.t << " N=" << file.perms.size() << '\n';
  for (const auto& p : file.perms) write_row(out, p.images);
}

PermFile read_perm(std::istream& in)
{
  LineReader reader(in);
  const Header header = read_header(reader, "perm", {"n", "t", "N"});
  PermFile file;
  file.n = header_int(header, "n", 1, 20);
  file.t = header_int(header, "t", 1, 20);
  if (file.t > file.n) throw ParseError(header.line, header.fields.at("t").column, "t exceeds n");
  const auto count = static_cast<std::uint64_t>(header_int(header, "N", 0, INT32_MAX));
  read_rows(reader, static_cast<std::size_t>(file.n), file.n, count,
            [&](std::size_t line, const std::vector<int>& values, const std::vector<std::size_t>& columns) {
              std::set<int> seen;
              for (std::size_t i = 0; i < values.size(); ++i)
                if (!seen.insert(values[i]).second)
                  throw ParseError(line, columns[i], "repeated image " + std::to_string(values[i]));
              file.perms.push_back(perm::Perm{values});
            });
  return file;
}

std::string sniff_family(const std::filesystem::path& path)
{
  auto in = open_input(path);
  LineReader reader(in);
  std::string line;
  if (!reader.next(line)) throw ParseError(1, 0, "empty file");
  const auto tokens = tokenize(line);
  if (tokens.size() >= 2 && tokens[0].text == "#") {
    for (const char* family : {"oa", "design", "perm"})
      if (tokens[1].text == family) return family;
  }
  throw ParseError(reader.number(), 1, "unrecognised header");
}

OAFile read_oa_file(const std::filesystem::path& path)
{
  auto in = open_input(path);
  return read_oa(in);
}

DesignFile read_design_file(const std::filesystem::path& path)
{
  auto in = open_input(path);
  return read_design(in);
}

PermFile read_perm_file(const std::filesystem::path& path)
{
  auto in = open_input(path);
  return read_perm(in);
}

void write_oa_file(const std::filesystem::path& path, const OAFile& file)
{
  auto out = open_output(path);
  write_oa(out, file);
}

void write_design_file(const std::filesystem::path& path, const DesignFile& file)
{
  auto out = open_output(path);
  write_design(out, file);
}

void write_perm_file(const std::filesystem::path& path, const PermFile& file)
{
  auto out = open_output(path);
  write_perm(out, file);
}

}  // namespace rigidgen::formats
