#include "cmaml/meta/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "cmaml/errors.hpp"

namespace cmaml::meta {

namespace {

constexpr const char* kMagic = "CMAML-CHECKPOINT";
constexpr int kVersion = 1;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_spec(std::ostream& out, const std::string& name,
                const MlpSpec& spec) {
  out << name << " =";
  for (int s : spec.layer_sizes) out << ' ' << s;
  out << " | " << activation_name(spec.activation) << ' '
      << head_name(spec.head) << '\n';
}

MlpSpec parse_spec(const std::string& text) {
  MlpSpec spec;
  const auto bar = text.find('|');
  if (bar == std::string::npos)
    throw IoError("checkpoint: malformed spec line: " + text);
  std::istringstream sizes(text.substr(0, bar));
  int v;
  while (sizes >> v) spec.layer_sizes.push_back(v);
  std::istringstream rest(text.substr(bar + 1));
  std::string act, head;
  rest >> act >> head;
  spec.activation = activation_from_name(act);
  spec.head = head_from_name(head);
  spec.validate();
  return spec;
}

void write_array(std::ostream& out, const std::string& name, const Vec& v) {
  out << "[array " << name << ' ' << v.size() << "]\n";
  for (int i = 0; i < v.size(); ++i)
    out << format_double(v[i]) << (((i + 1) % 4 == 0) ? '\n' : ' ');
  if (v.size() % 4 != 0) out << '\n';
}

}  // namespace

std::string head_name(numkit::OutputHead head) {
  switch (head) {
    case numkit::OutputHead::ScalarValue: return "scalar_value";
    case numkit::OutputHead::GaussianPolicy: return "gaussian_policy";
    case numkit::OutputHead::CategoricalPolicy: return "categorical_policy";
  }
  return "scalar_value";
}

std::string activation_name(numkit::Activation activation) {
  return activation == numkit::Activation::Tanh ? "tanh" : "relu";
}

numkit::OutputHead head_from_name(const std::string& name) {
  if (name == "scalar_value") return numkit::OutputHead::ScalarValue;
  if (name == "gaussian_policy") return numkit::OutputHead::GaussianPolicy;
  if (name == "categorical_policy")
    return numkit::OutputHead::CategoricalPolicy;
  throw ConfigError("unknown output head: " + name);
}

numkit::Activation activation_from_name(const std::string& name) {
  if (name == "tanh") return numkit::Activation::Tanh;
  if (name == "relu") return numkit::Activation::Relu;
  throw ConfigError("unknown activation: " + name);
}

void save_checkpoint(const MetaCheckpoint& checkpoint,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("save_checkpoint: cannot open " + path);
  out << kMagic << ' ' << kVersion << '\n';
  out << "seed = " << checkpoint.seed << '\n';
  out << "outer_iteration = " << checkpoint.outer_iteration << '\n';
  out << "meta_lambda = " << format_double(checkpoint.meta_lambda) << '\n';
  out << "eta = " << format_double(checkpoint.eta) << '\n';
  write_spec(out, "policy_spec", checkpoint.policy_spec);
  write_spec(out, "critic_spec", checkpoint.critic_spec);
  out << "[config " << checkpoint.config_echo.size() << "]\n";
  for (const auto& [key, value] : checkpoint.config_echo)
    out << key << " = " << value << '\n';
  write_array(out, "meta_policy", checkpoint.meta_policy);
  write_array(out, "meta_cost_critic", checkpoint.meta_cost_critic);
  out << "end\n";
  if (!out) throw IoError("save_checkpoint: write failed: " + path);
}

MetaCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_checkpoint: cannot open " + path);
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != kMagic)
    throw IoError("load_checkpoint: bad magic string in " + path);
  if (version != kVersion)
    throw IoError("load_checkpoint: unsupported version in " + path);
  in.ignore(std::numeric_limits<std::streamsize>::max(), '\n');

  MetaCheckpoint checkpoint;
  std::string line;
  auto value_of = [](const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos)
      throw IoError("checkpoint: expected key = value, got: " + text);
    auto v = text.substr(eq + 1);
    const auto first = v.find_first_not_of(' ');
    return (first == std::string::npos) ? std::string() : v.substr(first);
  };

  std::getline(in, line);
  checkpoint.seed = std::stoull(value_of(line));
  std::getline(in, line);
  checkpoint.outer_iteration = std::stoi(value_of(line));
  std::getline(in, line);
  checkpoint.meta_lambda = std::stod(value_of(line));
  std::getline(in, line);
  checkpoint.eta = std::stod(value_of(line));
  std::getline(in, line);
  checkpoint.policy_spec = parse_spec(value_of(line));
  std::getline(in, line);
  checkpoint.critic_spec = parse_spec(value_of(line));

  std::getline(in, line);
  int config_count = 0;
  if (std::sscanf(line.c_str(), "[config %d]", &config_count) != 1)
    throw IoError("checkpoint: expected [config N], got: " + line);
  for (int i = 0; i < config_count; ++i) {
    std::getline(in, line);
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw IoError("checkpoint: malformed config line: " + line);
    std::string key = line.substr(0, eq);
    while (!key.empty() && key.back() == ' ') key.pop_back();
    checkpoint.config_echo[key] = value_of(line);
  }

  auto read_array = [&](const std::string& expected) {
    std::getline(in, line);
    char name[64];
    long n = 0;
    if (std::sscanf(line.c_str(), "[array %63s %ld]", name, &n) != 2 ||
        expected != name)
      throw IoError("checkpoint: expected [array " + expected + " N]");
    Vec v(n);
    for (long i = 0; i < n; ++i)
      if (!(in >> v[i])) throw IoError("checkpoint: truncated array " + expected);
    in.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
    return v;
  };
  checkpoint.meta_policy = read_array("meta_policy");
  checkpoint.meta_cost_critic = read_array("meta_cost_critic");
  std::getline(in, line);
  if (line != "end") throw IoError("checkpoint: missing end marker");
  return checkpoint;
}

}  // namespace cmaml::meta
