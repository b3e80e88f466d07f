#include "dendra/classifier.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "dendra/errors.hpp"
#include "dendra/kernels.hpp"

namespace dendra {

Network::Network(const NetworkShape& shape, const SdpParams& params) : shape_(shape), params_(params) {
  if (shape.rf_count == 0 || shape.label_count == 0 || shape.segments == 0 || shape.inputs == 0)
    throw DomainError("network sizes must all be >= 1");
  params_.validate();
  units_.assign(shape.unit_count(), WeightMatrix(shape.inputs, shape.segments, params.w_0, params.scale_denominator));
}

Network build_network(std::size_t rf_count, std::size_t label_count, std::size_t segments_per_unit,
                      std::size_t inputs_per_rf, const SdpParams& params) {
  return Network(NetworkShape{rf_count, label_count, segments_per_unit, inputs_per_rf}, params);
}

bool cv_infer(const SpikeVector& context, const WeightMatrix& unit, const SdpParams& params) {
  return dendrite_infer(context, true, unit, params).fired();
}

namespace {

std::size_t argmax_lowest(const std::vector<std::uint32_t>& counts) {
  std::size_t best = 0;
  for (std::size_t l = 1; l < counts.size(); ++l)
    if (counts[l] > counts[best]) best = l;
  return best;
}

}  // namespace

VoteTally classify(std::span<const SpikeVector> contexts, const Network& net, Exec exec) {
  std::vector<std::uint8_t> votes(net.shape().unit_count());
  if (exec == Exec::parallel)
    kernels::votes_parallel(net, contexts, votes);
  else
    kernels::votes_serial(net, contexts, votes);
  VoteTally t;
  t.counts = kernels::tally(votes, net.shape().label_count);
  t.winner = argmax_lowest(t.counts);
  return t;
}

VoteTally supervise(std::span<const SpikeVector> contexts, std::size_t true_label, Network& net, bool learning,
                    Exec exec) {
  if (true_label >= net.shape().label_count) throw DomainError("label out of range");
  if (!learning) return classify(contexts, net, exec);
  std::vector<std::uint8_t> votes(net.shape().unit_count());
  if (exec == Exec::parallel)
    kernels::supervise_parallel(net, contexts, true_label, votes);
  else
    kernels::supervise_serial(net, contexts, true_label, votes);
  VoteTally t;
  t.counts = kernels::tally(votes, net.shape().label_count);
  t.winner = argmax_lowest(t.counts);
  return t;
}

// Layout: <dir>/manifest.txt with key=value lines and <dir>/units.bin, the
// concatenated binary dumps of every unit in index order.
void save_network(const std::string& dir, const Network& net) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream m(dir + "/manifest.txt");
    if (!m) throw InputError("cannot write manifest in " + dir);
    const auto& s = net.shape();
    const auto& p = net.params();
    m << "format=dendra-network-1\n"
      << "rf_count=" << s.rf_count << "\nlabel_count=" << s.label_count << "\nsegments=" << s.segments
      << "\ninputs=" << s.inputs << "\nscale_denominator=" << p.scale_denominator << "\ncapture=" << p.capture
      << "\nbackoff=" << p.backoff << "\nsearch=" << p.search << "\nw_max=" << p.w_max << "\nw_0=" << p.w_0
      << "\nthreshold=" << p.threshold << "\n";
  }
  std::ofstream out(dir + "/units.bin", std::ios::binary);
  if (!out) throw InputError("cannot write units in " + dir);
  for (const auto& u : net.units()) write_binary(out, u);
}

Network load_network(const std::string& dir) {
  std::ifstream m(dir + "/manifest.txt");
  if (!m) throw InputError("missing manifest in " + dir);
  std::map<std::string, long long> kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(m, line)) {
    ++line_no;
    if (line.empty() || line.rfind("format=", 0) == 0) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw InputError("bad manifest line", line_no);
    try {
      kv[line.substr(0, eq)] = std::stoll(line.substr(eq + 1));
    } catch (const std::exception&) {
      throw InputError("bad manifest value", line_no);
    }
  }
  auto get = [&](const char* key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw InputError(std::string("manifest is missing ") + key);
    return it->second;
  };
  NetworkShape s{static_cast<std::size_t>(get("rf_count")), static_cast<std::size_t>(get("label_count")),
                 static_cast<std::size_t>(get("segments")), static_cast<std::size_t>(get("inputs"))};
  SdpParams p;
  p.scale_denominator = static_cast<Weight>(get("scale_denominator"));
  p.capture = static_cast<Weight>(get("capture"));
  p.backoff = static_cast<Weight>(get("backoff"));
  p.search = static_cast<Weight>(get("search"));
  p.w_max = static_cast<Weight>(get("w_max"));
  p.w_0 = static_cast<Weight>(get("w_0"));
  p.threshold = get("threshold");
  Network net(s, p);
  std::ifstream in(dir + "/units.bin", std::ios::binary);
  if (!in) throw InputError("missing units.bin in " + dir);
  for (auto& u : net.units()) {
    u = read_binary(in);
    if (u.rows() != s.inputs || u.cols() != s.segments) throw InputError("unit shape does not match manifest");
  }
  return net;
}

}  // namespace dendra
