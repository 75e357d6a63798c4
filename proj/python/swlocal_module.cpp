#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "swlocal/errors.hpp"
#include "swlocal/harness.hpp"

namespace py = pybind11;
using namespace swlocal;

namespace {

// JSON crosses the boundary as text; the Python side decodes it.
py::object from_json(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

nlohmann::json to_json_value(const py::object& o) {
  return nlohmann::json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

ScheduleOptions schedule_options(const std::vector<double>& rates, double epsilon0, std::uint64_t b0,
                                 std::uint64_t growth, int max_level, double beta,
                                 const std::string& seed, std::uint64_t n) {
  ScheduleOptions o;
  o.rates = rates;
  o.epsilon0 = epsilon0;
  o.b0 = b0;
  o.growth = growth;
  o.max_level = max_level;
  o.beta = beta;
  o.seed = Seed128::parse(seed);
  o.n = n;
  return o;
}

py::bytes as_bytes(const std::vector<std::uint8_t>& v) {
  return py::bytes(reinterpret_cast<const char*>(v.data()), v.size());
}

std::vector<std::uint8_t> from_bytes(const py::bytes& b) {
  const std::string s = b;
  return {s.begin(), s.end()};
}

}  // namespace

PYBIND11_MODULE(_swlocal, m) {
  m.doc() = "Locally decodable Slepian-Wolf coding";

  static py::exception<Error> error(m, "Error", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  m.def("analyze", [](const std::string& pmf_spec) {
    const auto pmf = pmf_from_spec(pmf_spec);
    const auto e = entropy_stats(pmf);
    nlohmann::json j;
    j["marginal_entropy"] = e.marginal;
    j["joint_entropy"] = e.joint;
    j["conditional_entropy"] = e.conditional;
    std::vector<bool> conf;
    for (int s = 0; s < pmf.k(); ++s) conf.push_back(is_confusable(pmf, s).confusable);
    j["confusable"] = conf;
    if (pmf.k() == 2) j["coupling_full_support"] = coupling_full_support(pmf);
    return from_json(j);
  }, py::arg("pmf"), "Entropy and confusability of a pmf given as a spec such as 'dsbs:0.1'.");

  m.def("sample", [](const std::string& pmf_spec, std::size_t n, std::uint64_t seed) {
    return sample(pmf_from_spec(pmf_spec), n, seed);
  }, py::arg("pmf"), py::arg("n"), py::arg("seed"));

  m.def("bin_hash", [](const std::string& seed, int source, int level, std::uint64_t block,
                       const std::vector<Symbol>& symbols, std::size_t bits) {
    const BinningKey key{Seed128::parse(seed), static_cast<std::uint8_t>(source),
                         static_cast<std::uint8_t>(level), block};
    return bin_hash(key, symbols, bits).to_string();
  }, py::arg("seed"), py::arg("source"), py::arg("level"), py::arg("block"), py::arg("symbols"),
     py::arg("bits"));

  m.def("build_schedule", [](const std::string& pmf_spec, const std::vector<double>& rates,
                             double epsilon0, std::uint64_t b0, std::uint64_t growth, int max_level,
                             double beta, const std::string& seed, std::uint64_t n) {
    return from_json(build_schedule(pmf_from_spec(pmf_spec),
                                    schedule_options(rates, epsilon0, b0, growth, max_level, beta, seed, n))
                         .to_json());
  }, py::arg("pmf"), py::arg("rates"), py::arg("epsilon0") = 0.25, py::arg("b0") = 4,
     py::arg("growth") = 16, py::arg("max_level") = 0, py::arg("beta") = 0.5, py::arg("seed") = "1",
     py::arg("n") = 0);

  m.def("probe_budget", [](const py::object& schedule, int level) {
    return probe_budget(CodecSchedule::from_json(to_json_value(schedule)), level);
  }, py::arg("schedule"), py::arg("level"));

  m.def("encode", [](const py::object& schedule, const std::vector<Sequence>& sequences) {
    const auto s = CodecSchedule::from_json(to_json_value(schedule));
    return as_bytes(hier_encode(s, sequences).serialize());
  }, py::arg("schedule"), py::arg("sequences"), "Container bytes for the given schedule.");

  m.def("decode_local", [](const py::object& schedule, const py::bytes& container,
                           std::uint64_t position, int level) {
    const auto s = CodecSchedule::from_json(to_json_value(schedule));
    const auto c = CompressedContainer::parse(from_bytes(container), s);
    const auto r = hier_local_decode(s, c, position, level);
    py::dict d;
    d["position"] = r.position;
    d["level"] = r.level;
    d["symbols"] = r.symbols;
    d["probes"] = r.probes.count();
    d["fallback"] = r.fallback;
    return d;
  }, py::arg("schedule"), py::arg("container"), py::arg("position"), py::arg("level") = 0);

  m.def("bench_locality", [](const py::object& config) {
    const auto c = config_from_json(to_json_value(config));
    validate_config(c);
    return to_csv(bench_locality(c));
  }, py::arg("config"), "CSV text of a Monte Carlo locality run.");

  m.def("roundtrip", [](const py::object& config) {
    const auto c = config_from_json(to_json_value(config));
    validate_config(c);
    return from_json(to_json(roundtrip(c)));
  }, py::arg("config"));

  m.def("oracle", [](const py::object& config) {
    const auto c = config_from_json(to_json_value(config));
    validate_config(c);
    return from_json(to_json(run_oracle(c)));
  }, py::arg("config"));
}
