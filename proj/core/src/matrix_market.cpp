#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "wavekrylov/error.hpp"
#include "wavekrylov/model_problems.hpp"

namespace wavekrylov
{

namespace
{

struct ParsedEntry
{
  Triplet entry;
  std::size_t line;
};

struct ParsedMatrix
{
  std::size_t n = 0;
  bool symmetric = false;
  std::vector<ParsedEntry> entries;
};

std::string Lower(std::string s)
{
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

[[noreturn]] void ParseError(const std::filesystem::path &path, std::size_t line, const std::string &what)
{
  throw Error("matrix market parse error in " + path.string() + " line " + std::to_string(line) +
              ": " + what);
}

template <typename T>
bool ParseToken(std::string_view token, T &out)
{
  const auto *first = token.data();
  const auto *last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::vector<std::string_view> SplitWhitespace(std::string_view s)
{
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < s.size())
  {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i])))
    {
      i++;
    }
    const auto start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i])))
    {
      i++;
    }
    if (i > start)
    {
      tokens.push_back(s.substr(start, i - start));
    }
  }
  return tokens;
}

ParsedMatrix Parse(const std::filesystem::path &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw Error("cannot open matrix market file " + path.string());
  }
  ParsedMatrix out;
  std::string line;
  std::size_t lineno = 0;

  if (!std::getline(in, line))
  {
    ParseError(path, 1, "empty file");
  }
  lineno++;
  {
    std::istringstream header(Lower(line));
    std::string banner, object, format, field, symmetry;
    header >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%matrixmarket" || object != "matrix")
    {
      ParseError(path, lineno, "missing %%MatrixMarket matrix banner");
    }
    if (format != "coordinate")
    {
      ParseError(path, lineno, "only coordinate format is supported");
    }
    if (field != "real" && field != "double")
    {
      ParseError(path, lineno, "only real fields are supported, got '" + field + "'");
    }
    if (symmetry == "symmetric")
    {
      out.symmetric = true;
    }
    else if (symmetry != "general")
    {
      ParseError(path, lineno, "unsupported symmetry '" + symmetry + "'");
    }
  }

  bool have_size = false;
  std::size_t rows = 0, cols = 0, nnz = 0;
  while (std::getline(in, line))
  {
    lineno++;
    const auto tokens = SplitWhitespace(line);
    if (tokens.empty() || tokens.front().front() == '%')
    {
      continue;
    }
    if (!have_size)
    {
      if (tokens.size() != 3 || !ParseToken(tokens[0], rows) || !ParseToken(tokens[1], cols) ||
          !ParseToken(tokens[2], nnz))
      {
        ParseError(path, lineno, "expected size line 'rows cols nnz'");
      }
      if (rows != cols)
      {
        ParseError(path, lineno, "matrix is not square");
      }
      out.n = rows;
      out.entries.reserve(nnz);
      have_size = true;
      continue;
    }
    std::size_t i = 0, j = 0;
    double v = 0.0;
    if (tokens.size() != 3 || !ParseToken(tokens[0], i) || !ParseToken(tokens[1], j) ||
        !ParseToken(tokens[2], v))
    {
      ParseError(path, lineno, "malformed entry '" + line + "'");
    }
    if (i < 1 || j < 1 || i > out.n || j > out.n)
    {
      ParseError(path, lineno, "index out of range");
    }
    out.entries.push_back({{i - 1, j - 1, v}, lineno});
  }
  if (!have_size)
  {
    ParseError(path, lineno, "missing size line");
  }
  if (out.entries.size() != nnz)
  {
    ParseError(path, lineno,
               "expected " + std::to_string(nnz) + " entries, found " + std::to_string(out.entries.size()));
  }
  return out;
}

CsrMatrix Assemble(const ParsedMatrix &parsed)
{
  std::vector<Triplet> triplets;
  triplets.reserve(parsed.entries.size() * (parsed.symmetric ? 2 : 1));
  for (const auto &e : parsed.entries)
  {
    triplets.push_back(e.entry);
    if (parsed.symmetric && e.entry.row != e.entry.col)
    {
      triplets.push_back({e.entry.col, e.entry.row, e.entry.value});
    }
  }
  return CsrMatrix::FromTriplets(triplets, parsed.n, true);
}

}  // namespace

CsrMatrix read_matrix_market(const std::filesystem::path &path)
{
  return Assemble(Parse(path));
}

void write_matrix_market(const CsrMatrix &A, const std::filesystem::path &path)
{
  if (!check_symmetric(A, 0.0))
  {
    throw Error("write_matrix_market: matrix is not symmetric; refusing symmetric storage");
  }
  std::FILE *f = std::fopen(path.c_str(), "w");
  if (!f)
  {
    throw Error("cannot open " + path.string() + " for writing");
  }
  const auto offsets = A.RowOffsets();
  const auto cols = A.ColIndices();
  const auto vals = A.Values();
  std::size_t lower = 0;
  for (std::size_t i = 0; i < A.Size(); i++)
  {
    for (auto k = offsets[i]; k < offsets[i + 1]; k++)
    {
      lower += cols[k] <= i;
    }
  }
  bool ok = std::fprintf(f, "%%%%MatrixMarket matrix coordinate real symmetric\n") > 0;
  ok = ok && std::fprintf(f, "%zu %zu %zu\n", A.Size(), A.Size(), lower) > 0;
  for (std::size_t i = 0; i < A.Size() && ok; i++)
  {
    for (auto k = offsets[i]; k < offsets[i + 1] && ok; k++)
    {
      if (cols[k] <= i)
      {
        ok = std::fprintf(f, "%zu %zu %.16e\n", i + 1, cols[k] + 1, vals[k]) > 0;
      }
    }
  }
  ok = (std::fclose(f) == 0) && ok;
  if (!ok)
  {
    throw Error("I/O failure writing " + path.string());
  }
}

Pencil load_matrix_market(const std::filesystem::path &path_S, const std::filesystem::path &path_M)
{
  const auto parsed_M = Parse(path_M);
  for (const auto &e : parsed_M.entries)
  {
    if (e.entry.row != e.entry.col)
    {
      throw Error("mass matrix not lumped: off-diagonal entry (" + std::to_string(e.entry.row + 1) +
                  ", " + std::to_string(e.entry.col + 1) + ") at " + path_M.string() + " line " +
                  std::to_string(e.line));
    }
  }
  Pencil p;
  p.stiffness = read_matrix_market(path_S);
  p.mass = Assemble(parsed_M);
  p.label = path_S.stem().string();
  validate_pencil(p);
  return p;
}

void save_matrix_market(const Pencil &pencil, const std::filesystem::path &path_S,
                        const std::filesystem::path &path_M)
{
  write_matrix_market(pencil.stiffness, path_S);
  write_matrix_market(pencil.mass, path_M);
}

}  // namespace wavekrylov
