#include "schurlr/cost_model.hpp"

#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace schurlr {

void CostParams::validate() const {
  if (ts < 0 || tw < 0 || tc < 0) throw std::invalid_argument("CostParams: negative time parameter");
  if (p < 1) throw std::invalid_argument("CostParams: rank count must be >= 1");
}

CommTrace& CommTrace::operator+=(const CommTrace& o) {
  p2p_messages += o.p2p_messages;
  p2p_words += o.p2p_words;
  allreduce_count += o.allreduce_count;
  allreduce_words += o.allreduce_words;
  gather_count += o.gather_count;
  gather_words += o.gather_words;
  flops += o.flops;
  return *this;
}

CommTrace operator-(CommTrace a, const CommTrace& b) {
  a.p2p_messages -= b.p2p_messages;
  a.p2p_words -= b.p2p_words;
  a.allreduce_count -= b.allreduce_count;
  a.allreduce_words -= b.allreduce_words;
  a.gather_count -= b.gather_count;
  a.gather_words -= b.gather_words;
  a.flops -= b.flops;
  return a;
}

int log2_ceil(int p) {
  int l = 0;
  while ((1 << l) < p) ++l;
  return l;
}

CostReport model_cost(const CommTrace& t, const CostParams& params) {
  params.validate();
  const double levels = log2_ceil(params.p);
  CostReport r;
  r.p2p = static_cast<double>(t.p2p_messages) * params.ts + static_cast<double>(t.p2p_words) * params.tw;
  r.allreduce = levels * (static_cast<double>(t.allreduce_count) * params.ts +
                          static_cast<double>(t.allreduce_words) * params.tw);
  r.gather = levels * static_cast<double>(t.gather_count) * params.ts +
             static_cast<double>(t.gather_words) * (params.p - 1) * params.tw;
  r.compute = static_cast<double>(t.flops) * params.tc;
  return r;
}

namespace {

template <class Emit>
void for_each_row(const CommTrace& t, const CostParams& params, Emit emit) {
  const CostReport r = model_cost(t, params);
  emit("p2p_messages", static_cast<double>(t.p2p_messages));
  emit("p2p_words", static_cast<double>(t.p2p_words));
  emit("allreduce_count", static_cast<double>(t.allreduce_count));
  emit("allreduce_words", static_cast<double>(t.allreduce_words));
  emit("gather_count", static_cast<double>(t.gather_count));
  emit("gather_words", static_cast<double>(t.gather_words));
  emit("flops", static_cast<double>(t.flops));
  emit("time_p2p", r.p2p);
  emit("time_allreduce", r.allreduce);
  emit("time_gather", r.gather);
  emit("time_compute", r.compute);
  emit("time_total", r.total());
}

}  // namespace

void write_cost_csv(std::ostream& out, const CommTrace& t, const CostParams& params) {
  out << "name,value\n" << std::setprecision(17);
  for_each_row(t, params, [&](const char* name, double v) { out << name << ',' << v << '\n'; });
}

void write_cost_table(std::ostream& out, const CommTrace& t, const CostParams& params) {
  out << "cost model: p=" << params.p << " ts=" << params.ts << " tw=" << params.tw << " tc=" << params.tc
      << "\n(gather/scatter charged as log2(p) ts + m (p-1) tw, m = words per destination)\n";
  for_each_row(t, params, [&](const char* name, double v) {
    out << std::left << std::setw(18) << name << std::right << std::setw(24) << std::setprecision(10) << v << '\n';
  });
}

}  // namespace schurlr
