#include "mgcnn/checkpoint.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace mgcnn {

namespace {

void write_tensor(std::ostringstream& out, const std::string& name, std::initializer_list<long> dims,
                  std::span<const double> values) {
  out << "tensor " << name;
  for (long d : dims) out << ' ' << d;
  out << '\n';
  const long row = *(dims.end() - 1);
  char buf[64];
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto res = std::to_chars(buf, buf + sizeof buf, values[i]);
    out << std::string_view(buf, res.ptr - buf) << ((static_cast<long>(i) + 1) % row == 0 ? '\n' : ' ');
  }
}

}  // namespace

std::string checkpoint_to_text(const Checkpoint& ckpt) {
  const ModelParams& p = ckpt.params;
  const ModelConfig& c = p.config;
  std::ostringstream out;
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, c.dropout_rate);
  out << kCheckpointVersion << '\n';
  out << "config nodes=" << c.nodes << " features=" << c.features << " lookback=" << c.lookback
      << " order=" << c.order << " hidden1=" << c.hidden1 << " hidden2=" << c.hidden2
      << " outputs=" << c.outputs << " dropout_rate=" << std::string_view(buf, res.ptr - buf)
      << " horizon=" << ckpt.horizon << '\n';
  auto span = [](const auto& m) { return std::span<const double>(m.data(), static_cast<std::size_t>(m.size())); };
  write_tensor(out, "layer1.theta", {c.order, c.features, c.hidden1}, span(p.layer1.theta));
  write_tensor(out, "layer2.theta", {c.order, c.hidden1, c.hidden2}, span(p.layer2.theta));
  write_tensor(out, "temporal_weights", {c.hidden2, c.lookback}, span(p.temporal_weights));
  write_tensor(out, "dense_w", {c.hidden2, c.outputs}, span(p.dense_w));
  write_tensor(out, "dense_b", {c.outputs}, span(p.dense_b));
  out << "end\n";
  return out.str();
}

Checkpoint checkpoint_from_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kCheckpointVersion) {
    throw DataError("not a checkpoint: expected version '" + std::string(kCheckpointVersion) + "'");
  }
  if (!std::getline(in, line) || line.rfind("config ", 0) != 0) throw DataError("checkpoint: missing config line");

  std::map<std::string, std::string> kv;
  {
    std::istringstream ls(line.substr(7));
    std::string tok;
    while (ls >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) throw DataError("checkpoint: malformed config entry '" + tok + "'");
      kv[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
  }
  auto get = [&](const std::string& key, auto& out) {
    auto it = kv.find(key);
    if (it == kv.end()) throw DataError("checkpoint: config is missing '" + key + "'");
    const auto& s = it->second;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc{} || p != s.data() + s.size()) throw DataError("checkpoint: bad value for '" + key + "'");
  };
  Checkpoint ckpt;
  ModelConfig c;
  get("nodes", c.nodes);
  get("features", c.features);
  get("lookback", c.lookback);
  get("order", c.order);
  get("hidden1", c.hidden1);
  get("hidden2", c.hidden2);
  get("outputs", c.outputs);
  get("dropout_rate", c.dropout_rate);
  get("horizon", ckpt.horizon);
  ckpt.params = ModelParams(c);

  std::map<std::string, std::pair<std::vector<long>, std::span<double>>> expected;
  auto& p = ckpt.params;
  auto span = [](auto& m) { return std::span<double>(m.data(), static_cast<std::size_t>(m.size())); };
  expected["layer1.theta"] = {{c.order, c.features, c.hidden1}, span(p.layer1.theta)};
  expected["layer2.theta"] = {{c.order, c.hidden1, c.hidden2}, span(p.layer2.theta)};
  expected["temporal_weights"] = {{c.hidden2, c.lookback}, span(p.temporal_weights)};
  expected["dense_w"] = {{c.hidden2, c.outputs}, span(p.dense_w)};
  expected["dense_b"] = {{c.outputs}, span(p.dense_b)};

  std::string tok;
  while (in >> tok) {
    if (tok == "end") {
      if (!expected.empty()) throw DataError("checkpoint: missing tensor '" + expected.begin()->first + "'");
      return ckpt;
    }
    if (tok != "tensor") throw DataError("checkpoint: expected 'tensor', got '" + tok + "'");
    std::string name;
    in >> name;
    auto it = expected.find(name);
    if (it == expected.end()) throw DataError("checkpoint: unexpected or duplicate tensor '" + name + "'");
    for (long want : it->second.first) {
      long got = -1;
      if (!(in >> got) || got != want) {
        throw DataError("checkpoint: tensor '" + name + "' shape does not match config");
      }
    }
    for (double& v : it->second.second) {
      std::string num;
      in >> num;
      auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), v);
      if (ec != std::errc{} || ptr != num.data() + num.size()) {
        throw DataError("checkpoint: bad value '" + num + "' in tensor '" + name + "'");
      }
    }
    expected.erase(it);
  }
  throw DataError("checkpoint: truncated (no 'end' marker)");
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint " + path.string());
  out << checkpoint_to_text(ckpt);
  if (!out) throw DataError("write failed for checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return checkpoint_from_text(buf.str());
}

}  // namespace mgcnn
