#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "swlocal/container.hpp"
#include "swlocal/errors.hpp"
#include "swlocal/harness.hpp"
#include "swlocal/hier_codec.hpp"
#include "swlocal/naive_codec.hpp"
#include "swlocal/oracle.hpp"
#include "swlocal/schedule.hpp"
#include "swlocal/source_model.hpp"

using namespace swlocal;
using nlohmann::json;

namespace {

// Raw flag values; only the ones actually given override the config file.
struct Flags {
  std::string config_path;
  std::string pmf, scheme, seed, positions, output;
  std::vector<double> rates;
  double epsilon0 = 0, beta = 0, max_search_work = 0, oracle_rate = 0;
  std::vector<std::uint64_t> block_lengths;
  std::uint64_t b0 = 0, growth = 0, n = 0, trials = 0;
  int max_level = 0;
  std::vector<int> levels;
  unsigned threads = 0;
  std::size_t oracle_n = 0;
  long oracle_probe_bits = 0;
};

struct Bound {
  CLI::App* app;
  std::map<std::string, CLI::Option*> opts;
  bool given(const std::string& name) const {
    auto it = opts.find(name);
    return it != opts.end() && it->second->count() > 0;
  }
};

Bound add_config_flags(CLI::App* app, Flags& f) {
  Bound b{app, {}};
  b.opts["config"] = app->add_option("--config", f.config_path, "JSON experiment config");
  b.opts["pmf"] = app->add_option("--pmf", f.pmf, "pmf: dsbs:RHO, zchannel:P:EPS, identity:M, inline JSON or file");
  b.opts["scheme"] = app->add_option("--scheme", f.scheme, "naive | hier | oracle");
  b.opts["rates"] = app->add_option("--rates", f.rates, "rate per source");
  b.opts["epsilon0"] = app->add_option("--epsilon0", f.epsilon0);
  b.opts["block_lengths"] = app->add_option("--block-lengths", f.block_lengths, "naive block sizes");
  b.opts["b0"] = app->add_option("--b0", f.b0);
  b.opts["growth"] = app->add_option("--growth", f.growth);
  b.opts["max_level"] = app->add_option("--max-level", f.max_level);
  b.opts["beta"] = app->add_option("--beta", f.beta);
  b.opts["levels"] = app->add_option("--levels", f.levels, "decode levels");
  b.opts["n"] = app->add_option("--n", f.n, "source length (0: default)");
  b.opts["trials"] = app->add_option("--trials", f.trials);
  b.opts["seed"] = app->add_option("--seed", f.seed, "decimal or 32 hex digits");
  b.opts["positions"] = app->add_option("--positions", f.positions, "random | default");
  b.opts["threads"] = app->add_option("--threads", f.threads);
  b.opts["max_search_work"] = app->add_option("--max-search-work", f.max_search_work);
  b.opts["oracle_n"] = app->add_option("--oracle-n", f.oracle_n);
  b.opts["oracle_rate"] = app->add_option("--oracle-rate", f.oracle_rate);
  b.opts["oracle_probe_bits"] = app->add_option("--oracle-probe-bits", f.oracle_probe_bits);
  b.opts["output"] = app->add_option("-o,--output", f.output, "output path (default stdout)");
  return b;
}

ExperimentConfig resolve_config(const Bound& b, const Flags& f) {
  ExperimentConfig c;
  if (b.given("config")) {
    std::ifstream in(f.config_path);
    if (!in) throw Error(Errc::Io, "cannot open config '" + f.config_path + "'");
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw Error(Errc::InvalidConfig, std::string("config: ") + e.what());
    }
    c = config_from_json(j, c);
  }
  if (b.given("pmf")) c.pmf = f.pmf;
  if (b.given("scheme")) c.scheme = parse_scheme(f.scheme);
  if (b.given("rates")) c.rates = f.rates;
  if (b.given("epsilon0")) c.epsilon0 = f.epsilon0;
  if (b.given("block_lengths")) c.block_lengths = f.block_lengths;
  if (b.given("b0")) c.b0 = f.b0;
  if (b.given("growth")) c.growth = f.growth;
  if (b.given("max_level")) c.max_level = f.max_level;
  if (b.given("beta")) c.beta = f.beta;
  if (b.given("levels")) c.levels = f.levels;
  if (b.given("n")) c.n = f.n;
  if (b.given("trials")) c.trials = f.trials;
  if (b.given("seed")) c.seed = Seed128::parse(f.seed);
  if (b.given("positions")) c = config_from_json(json{{"positions", f.positions}}, c);
  if (b.given("threads")) c.threads = f.threads;
  if (b.given("max_search_work")) c.max_search_work = f.max_search_work;
  if (b.given("oracle_n")) c.oracle_n = f.oracle_n;
  if (b.given("oracle_rate")) c.oracle_rate = f.oracle_rate;
  if (b.given("oracle_probe_bits")) c.oracle_probe_bits = f.oracle_probe_bits;
  if (b.given("output")) c.output = f.output;
  return c;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

json read_json_file(const std::string& path) {
  const auto bytes = read_file(path);
  try {
    return json::parse(bytes.begin(), bytes.end());
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidConfig, path + ": " + e.what());
  }
}

// Schedule for encode: naive uses a single level at the first block length.
CodecSchedule encode_schedule(const ExperimentConfig& c, std::uint64_t n) {
  ExperimentConfig s = c;
  if (c.scheme == Scheme::Naive) {
    s.b0 = c.block_lengths.at(0);
    s.max_level = 0;
    s.growth = 16;
  } else if (c.scheme == Scheme::Oracle) {
    throw Error(Errc::InvalidConfig, "encode runs the naive or hier scheme");
  }
  s.n = n;
  return experiment_schedule(s, c.seed);
}

json analyze(const JointPmf& pmf) {
  const auto e = entropy_stats(pmf);
  json j;
  j["pmf"] = pmf_to_json(pmf);
  j["marginal_entropy"] = e.marginal;
  j["joint_entropy"] = e.joint;
  json cond = json::object();
  for (std::uint32_t mask = 1; mask <= e.full_mask(); ++mask) {
    std::string name;
    for (int s = 0; s < e.k; ++s)
      if (mask >> s & 1u) name += (name.empty() ? "" : ",") + std::to_string(s);
    cond[name] = e.conditional_of(mask);
  }
  j["conditional_entropy"] = cond;
  if (pmf.k() == 2) j["H(X|Y)"] = e.conditional_of(1u);
  json conf = json::array();
  for (int s = 0; s < pmf.k(); ++s) {
    const auto r = is_confusable(pmf, s);
    json c{{"source", s}, {"confusable", r.confusable}};
    if (r.witness_pair) c["non_confusable_pair"] = {r.witness_pair->first, r.witness_pair->second};
    conf.push_back(c);
  }
  j["confusability"] = conf;
  if (pmf.k() == 2) {
    const auto m = coupling(pmf);
    json rows = json::array();
    for (int r = 0; r < m.dim; ++r) {
      json row = json::array();
      for (int c = 0; c < m.dim; ++c) row.push_back(m(r, c));
      rows.push_back(row);
    }
    j["coupling"] = rows;
    j["coupling_full_support"] = coupling_full_support(pmf);
    if (!is_confusable(pmf, 0).confusable) j["reduction"] = reduction_to_json(build_reduction(pmf));
  }
  return j;
}

json sequences_json(const std::vector<Sequence>& seqs) {
  json j = json::array();
  for (const auto& s : seqs) j.push_back(std::vector<int>(s.begin(), s.end()));
  return j;
}

std::vector<Sequence> sequences_from_json(const json& j) {
  std::vector<Sequence> out;
  try {
    for (const auto& row : j) {
      Sequence s;
      for (const auto& v : row) {
        const int x = v.get<int>();
        if (x < 0 || x > 255) throw Error(Errc::BadShape, "symbol out of range");
        s.push_back(static_cast<Symbol>(x));
      }
      out.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw Error(Errc::BadShape, std::string("sequences: ") + e.what());
  }
  return out;
}

json local_json(const LocalDecodeResult& r) {
  return json{{"position", r.position},
              {"level", r.level},
              {"symbols", std::vector<int>(r.symbols.begin(), r.symbols.end())},
              {"probes", r.probes.count()},
              {"fallback", r.fallback}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"swlocal: locally decodable Slepian-Wolf codes"};
  app.require_subcommand(1);

  std::string pmf_arg;
  auto* analyze_cmd = app.add_subcommand("analyze", "entropy, confusability and coupling of a pmf");
  analyze_cmd->add_option("pmf", pmf_arg)->required();

  std::string reduce_pmf;
  auto* reduce_cmd = app.add_subcommand("reduce", "reduction of a non-confusable first source");
  reduce_cmd->add_option("pmf", reduce_pmf)->required();

  Flags enc_flags;
  std::string enc_input, enc_container, enc_schedule, enc_seqs_out;
  std::uint64_t enc_sample_seed = 0;
  auto* encode_cmd = app.add_subcommand("encode", "encode sequences into a container");
  auto enc_bound = add_config_flags(encode_cmd, enc_flags);
  encode_cmd->add_option("--input", enc_input, "JSON array of sequences (default: sample from pmf)");
  encode_cmd->add_option("--sample-seed", enc_sample_seed, "sampler seed when no input is given");
  encode_cmd->add_option("--container", enc_container, "container output path")->required();
  encode_cmd->add_option("--schedule", enc_schedule, "schedule JSON output path")->required();
  encode_cmd->add_option("--sequences-out", enc_seqs_out, "write the encoded sequences as JSON");

  std::string dl_container, dl_schedule;
  std::uint64_t dl_position = 0;
  int dl_level = -1;
  double dl_work = kMaxSearchWork;
  auto* dl_cmd = app.add_subcommand("decode-local", "decode one position");
  dl_cmd->add_option("--container", dl_container)->required();
  dl_cmd->add_option("--schedule", dl_schedule)->required();
  dl_cmd->add_option("--position", dl_position, "zero-based position")->required();
  dl_cmd->add_option("--level", dl_level, "decode level (default: max level)");
  dl_cmd->add_option("--max-search-work", dl_work);

  std::string df_container, df_schedule, df_out;
  double df_work = kMaxSearchWork;
  auto* df_cmd = app.add_subcommand("decode-full", "decode every position");
  df_cmd->add_option("--container", df_container)->required();
  df_cmd->add_option("--schedule", df_schedule)->required();
  df_cmd->add_option("--max-search-work", df_work);
  df_cmd->add_option("-o,--output", df_out);

  Flags bench_flags, rt_flags, or_flags;
  auto* bench_cmd = app.add_subcommand("bench-locality", "Monte Carlo local-decoding error (CSV)");
  auto bench_bound = add_config_flags(bench_cmd, bench_flags);
  auto* rt_cmd = app.add_subcommand("roundtrip", "encode, fully decode and compare");
  auto rt_bound = add_config_flags(rt_cmd, rt_flags);
  auto* oracle_cmd = app.add_subcommand("oracle", "exact local MAP error on a tiny instance");
  auto or_bound = add_config_flags(oracle_cmd, or_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*analyze_cmd) {
      std::cout << analyze(pmf_from_spec(pmf_arg)).dump(2) << '\n';
    } else if (*reduce_cmd) {
      std::cout << reduction_to_json(build_reduction(pmf_from_spec(reduce_pmf))).dump(2) << '\n';
    } else if (*encode_cmd) {
      const auto cfg = resolve_config(enc_bound, enc_flags);
      const auto pmf = pmf_from_spec(cfg.pmf);
      std::vector<Sequence> seqs;
      if (!enc_input.empty()) {
        seqs = sequences_from_json(read_json_file(enc_input));
      } else {
        const std::uint64_t n = cfg.n ? cfg.n : encode_schedule(cfg, 0).true_n();
        seqs = sample(pmf, n, enc_sample_seed);
      }
      if (seqs.empty()) throw Error(Errc::LengthMismatch, "no sequences");
      const auto schedule = encode_schedule(cfg, seqs[0].size());
      const auto container = hier_encode(schedule, seqs);
      write_file(enc_container, container.serialize());
      emit(enc_schedule, schedule.to_json().dump(2) + "\n");
      if (!enc_seqs_out.empty()) emit(enc_seqs_out, sequences_json(seqs).dump() + "\n");
    } else if (*dl_cmd) {
      const auto schedule = CodecSchedule::from_json(read_json_file(dl_schedule));
      const auto container = CompressedContainer::parse(read_file(dl_container), schedule);
      const int level = dl_level < 0 ? schedule.max_level() : dl_level;
      if (level > schedule.max_level()) {
        throw Error(Errc::LevelOutOfRange, "level " + std::to_string(level) + " above max level");
      }
      std::cout << local_json(hier_local_decode(schedule, container, dl_position, level, dl_work)).dump()
                << '\n';
    } else if (*df_cmd) {
      const auto schedule = CodecSchedule::from_json(read_json_file(df_schedule));
      const auto container = CompressedContainer::parse(read_file(df_container), schedule);
      const auto r = hier_full_decode(schedule, container, df_work);
      emit(df_out, json{{"sequences", sequences_json(r.sequences)}, {"fallback", r.fallback}}.dump() + "\n");
    } else if (*bench_cmd) {
      const auto cfg = resolve_config(bench_bound, bench_flags);
      emit(cfg.output, to_csv(bench_locality(cfg)));
    } else if (*rt_cmd) {
      const auto cfg = resolve_config(rt_bound, rt_flags);
      emit(cfg.output, to_json(roundtrip(cfg)).dump(2) + "\n");
    } else if (*oracle_cmd) {
      auto cfg = resolve_config(or_bound, or_flags);
      cfg.scheme = Scheme::Oracle;
      emit(cfg.output, to_json(run_oracle(cfg)).dump(2) + "\n");
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
