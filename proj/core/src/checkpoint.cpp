#include "kgatt/checkpoint.hpp"

#include <istream>
#include <ostream>

#include "kgatt/text_io.hpp"

namespace kgatt {
namespace {

constexpr std::string_view kMagic = "kgatt-checkpoint 1";

void write_block(std::ostream& out, std::string_view name, const std::vector<double>& values, std::size_t rows,
                 std::size_t cols) {
  out << "block " << name << ' ' << rows << ' ' << cols << '\n';
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      if (j) out << ' ';
      out << format_double(values[i * cols + j]);
    }
    out << '\n';
  }
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::string next() {
    if (!read_line(in_, line_)) throw ParseError("unexpected end of checkpoint", line_no_);
    ++line_no_;
    return line_;
  }

  std::vector<double> block(std::string_view name, std::size_t& rows, std::size_t& cols) {
    const auto header = next();
    const auto f = split_fields(header, ' ');
    if (f.size() != 4 || f[0] != "block" || f[1] != name) {
      throw ParseError("expected block '" + std::string(name) + "'", line_no_);
    }
    rows = parse_size(f[2]);
    cols = parse_size(f[3]);
    std::vector<double> values;
    values.reserve(rows * cols);
    for (std::size_t i = 0; i < rows; ++i) {
      const auto line = next();
      if (cols == 0) continue;
      const auto cells = split_fields(line, ' ');
      if (cells.size() != cols) throw ParseError("wrong column count in block " + std::string(name), line_no_);
      for (auto c : cells) values.push_back(parse_double(c));
    }
    return values;
  }

  Matrix matrix(std::string_view name) {
    std::size_t rows = 0, cols = 0;
    auto values = block(name, rows, cols);
    Matrix m(rows, cols);
    m.values() = std::move(values);
    return m;
  }

  std::size_t line_no() const { return line_no_; }

 private:
  std::istream& in_;
  std::string line_;
  std::size_t line_no_ = 0;
};

}  // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& cp) {
  const auto kv = to_key_values(cp.config);
  out << kMagic << '\n';
  out << "config " << kv.size() << ' ' << config_fingerprint(cp.config) << '\n';
  for (const auto& [k, v] : kv) out << k << '=' << v << '\n';
  out << "use_bias " << (cp.params.use_bias ? 1 : 0) << '\n';
  const auto& p = cp.params;
  write_block(out, "base", p.base.values(), p.base.rows(), p.base.cols());
  write_block(out, "bias", p.bias.values(), p.bias.rows(), p.bias.cols());
  write_block(out, "diag", p.diag.values(), p.diag.rows(), p.diag.cols());
  write_block(out, "relation", p.relation.values(), p.relation.rows(), p.relation.cols());
  write_block(out, "attention", p.attention.values, 1, p.attention.values.size());
  out << "end\n";
}

Checkpoint read_checkpoint(std::istream& in) {
  Reader reader(in);
  if (reader.next() != kMagic) throw ParseError("not a checkpoint file", 1);
  Checkpoint cp;
  const auto header = reader.next();
  const auto hf = split_fields(header, ' ');
  if (hf.size() != 3 || hf[0] != "config") throw ParseError("expected config header", reader.line_no());
  const std::size_t entries = parse_size(hf[1]);
  const std::string expected_hash(hf[2]);
  for (std::size_t i = 0; i < entries; ++i) {
    const auto line = reader.next();
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected key=value", reader.line_no());
    if (!set_config_value(cp.config, std::string_view(line).substr(0, eq), std::string_view(line).substr(eq + 1))) {
      throw ParseError("unknown config key '" + line.substr(0, eq) + "'", reader.line_no());
    }
  }
  if (config_fingerprint(cp.config) != expected_hash) throw Error("checkpoint config fingerprint mismatch");
  const auto bias_line = reader.next();
  if (bias_line.rfind("use_bias ", 0) != 0) throw ParseError("expected use_bias", reader.line_no());
  cp.params.use_bias = parse_size(std::string_view(bias_line).substr(9)) != 0;
  cp.params.base = reader.matrix("base");
  cp.params.bias = reader.matrix("bias");
  cp.params.diag = reader.matrix("diag");
  cp.params.relation = reader.matrix("relation");
  std::size_t rows = 0, cols = 0;
  cp.params.attention.values = reader.block("attention", rows, cols);
  if (reader.next() != "end") throw ParseError("missing end marker", reader.line_no());
  return cp;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  auto out = open_output(path);
  write_checkpoint(out, checkpoint);
  if (!out) throw Error("failed writing " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_checkpoint(in);
}

}  // namespace kgatt
