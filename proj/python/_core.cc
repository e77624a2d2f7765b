// python/_core.cc

// Copyright 2026  mfc-mdd authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

// Python bindings: inventory, metrics, CTC, the expected-F1 loss and
// decoding with a trained checkpoint.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mdd/checkpoint.h"
#include "mdd/ctc.h"
#include "mdd/error.h"
#include "mdd/mdd_metrics.h"
#include "mdd/mfc_loss.h"
#include "mdd/nbest.h"
#include "mdd/text_io.h"

namespace py = pybind11;

namespace mdd {
namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

Tensor MatrixFromArray(const DoubleArray& a) {
  if (a.ndim() != 2) throw DimensionError("expected a 2-d array");
  const std::size_t rows = a.shape(0), cols = a.shape(1);
  return Tensor({rows, cols}, std::vector<double>(a.data(), a.data() + rows * cols));
}

DoubleArray ArrayFromTensor(const Tensor& t) {
  std::vector<py::ssize_t> shape(t.shape().begin(), t.shape().end());
  DoubleArray out(shape);
  std::copy(t.data(), t.data() + t.size(), out.mutable_data());
  return out;
}

py::object Optional(const std::optional<double>& v) {
  if (v) return py::float_(*v);
  return py::none();
}

py::dict CountsDict(const MddCounts& c) {
  py::dict d;
  d["tp"] = c.tp, d["fp"] = c.fp, d["fn"] = c.fn, d["tn"] = c.tn;
  d["cd"] = c.cd, d["id"] = c.id;
  d["c_d"] = c.c_d, d["c_h"] = c.c_h, d["c_dh"] = c.c_dh;
  d["insertions_detected"] = c.insertions_detected;
  d["insertions_annotated"] = c.insertions_annotated;
  d["phone_errors"] = c.phone_errors;
  d["reference_length"] = c.reference_length;
  d["utterance_f1"] = UtteranceF1(c);
  return d;
}

MddCounts CountsFromDict(const py::dict& d) {
  MddCounts c;
  auto get = [&](const char* k) { return d.contains(k) ? d[k].cast<std::int64_t>() : 0; };
  c.tp = get("tp"), c.fp = get("fp"), c.fn = get("fn"), c.tn = get("tn");
  c.cd = get("cd"), c.id = get("id");
  c.c_d = get("c_d"), c.c_h = get("c_h"), c.c_dh = get("c_dh");
  c.insertions_detected = get("insertions_detected");
  c.insertions_annotated = get("insertions_annotated");
  c.phone_errors = get("phone_errors");
  c.reference_length = get("reference_length");
  return c;
}

py::list HypothesesList(const HypothesisList& l) {
  py::list out;
  for (const Hypothesis& h : l.hypotheses) {
    py::dict d;
    d["phones"] = h.phones.ids;
    d["ctc_log_prob"] = h.ctc_log_prob;
    d["att_log_prob"] = h.att_log_prob;
    d["joint_score"] = h.joint_score;
    out.append(d);
  }
  return out;
}

class Recognizer {
 public:
  Recognizer(const std::string& path, const PhoneInventory& inventory)
      : params_(LoadCheckpoint(path, inventory).params) {}

  py::list Decode(const DoubleArray& features, int beam_width, int m_best, double alpha,
                  int max_len) const {
    SearchConfig sc;
    sc.beam_width = beam_width;
    sc.m_best = m_best;
    sc.alpha = alpha;
    sc.max_len = max_len;
    const Tensor f = MatrixFromArray(features);
    HypothesisList l;
    {
      py::gil_scoped_release release;
      l = BeamSearch(params_, Encode(params_, f), sc);
    }
    return HypothesesList(l);
  }

  DoubleArray CtcLogProbs(const DoubleArray& features) const {
    return ArrayFromTensor(Encode(params_, MatrixFromArray(features)).ctc_log_probs);
  }

  int feature_dim() const { return params_.config.feature_dim; }

 private:
  ModelParams params_;
};

}  // namespace
}  // namespace mdd

PYBIND11_MODULE(_core, m) {
  using namespace mdd;
  m.doc() = "Mispronunciation detection with maximum-F1 training";

  static py::exception<Error> base(m, "MddError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base);
  py::register_exception<FormatError>(m, "FormatError", base);
  py::register_exception<LookupError>(m, "LookupError", base);
  py::register_exception<DimensionError>(m, "DimensionError", base);
  py::register_exception<ContractError>(m, "ContractError", base);
  py::register_exception<SizeError>(m, "SizeError", base);
  py::register_exception<IoError>(m, "IoError", base);
  py::register_exception<NumericError>(m, "NumericError", base);

  py::class_<PhoneInventory>(m, "PhoneInventory")
      .def_static("default", &PhoneInventory::Default)
      .def_static("load", &PhoneInventory::Load, py::arg("path"))
      .def_static("from_symbols", &PhoneInventory::FromSymbols, py::arg("phones"))
      .def("index", &PhoneInventory::Index)
      .def("symbol", &PhoneInventory::Symbol)
      .def("encode",
           [](const PhoneInventory& inv, const std::vector<std::string>& s) {
             return inv.Encode(s).ids;
           })
      .def("decode",
           [](const PhoneInventory& inv, const std::vector<int>& ids) { return inv.Decode(ids); })
      .def("fingerprint", &PhoneInventory::Fingerprint)
      .def_property_readonly("symbols", &PhoneInventory::RegularSymbols)
      .def_property_readonly("unk", &PhoneInventory::unk)
      .def_property_readonly("blank", &PhoneInventory::blank)
      .def_property_readonly("output_size", &PhoneInventory::output_size)
      .def("__len__", &PhoneInventory::size);

  m.def(
      "mdd_counts",
      [](const std::vector<int>& c, const std::vector<int>& r, const std::vector<int>& h) {
        return CountsDict(ComputeMddCounts(c, r, h));
      },
      py::arg("canonical"), py::arg("reference"), py::arg("hypothesis"));

  m.def(
      "corpus_metrics",
      [](const std::vector<py::dict>& items) {
        std::vector<MddCounts> counts;
        for (const py::dict& d : items) counts.push_back(CountsFromDict(d));
        const MetricReport r = CorpusMetrics(counts);
        py::dict out;
        out["recall"] = Optional(r.recall);
        out["precision"] = Optional(r.precision);
        out["f1"] = Optional(r.f1);
        out["dar"] = Optional(r.dar);
        out["per"] = Optional(r.per);
        out["utterances"] = r.num_utterances;
        return out;
      },
      py::arg("counts"));

  m.def(
      "edit_distance",
      [](const std::vector<int>& a, const std::vector<int>& b) { return EditDistance(a, b); },
      py::arg("a"), py::arg("b"));

  m.def(
      "ctc_log_prob",
      [](const DoubleArray& log_probs, const std::vector<int>& target) {
        return CtcLogProb(MatrixFromArray(log_probs), target);
      },
      py::arg("log_probs"), py::arg("target"),
      "Log-probability of `target` under T x V log-probabilities; the blank is the last column.");

  m.def(
      "ctc_grad",
      [](const DoubleArray& log_probs, const std::vector<int>& target) {
        return ArrayFromTensor(CtcGrad(MatrixFromArray(log_probs), target));
      },
      py::arg("log_probs"), py::arg("target"));

  m.def(
      "ctc_collapse",
      [](const std::vector<int>& alignment, int blank) { return CtcCollapse(alignment, blank).ids; },
      py::arg("alignment"), py::arg("blank"));

  m.def(
      "expected_f1_loss",
      [](const std::vector<double>& scores, const std::vector<double>& f_scores) {
        Tape tape;
        std::vector<Var> vars;
        for (double s : scores) vars.push_back(tape.Leaf(Tensor::Scalar(s)));
        const Var loss = ExpectedF1Loss(vars, f_scores);
        tape.Backward(loss);
        std::vector<double> grads;
        for (const Var& v : vars) grads.push_back(tape.Grad(v).item());
        return py::make_tuple(loss.item(), grads);
      },
      py::arg("scores"), py::arg("f_scores"),
      "Returns (loss, d loss / d scores) for the negated softmax-weighted F1.");

  py::class_<Recognizer>(m, "Recognizer")
      .def(py::init<const std::string&, const PhoneInventory&>(), py::arg("checkpoint"),
           py::arg("inventory") = PhoneInventory::Default())
      .def("decode", &Recognizer::Decode, py::arg("features"), py::arg("beam_width") = 8,
           py::arg("m_best") = 8, py::arg("alpha") = 0.3, py::arg("max_len") = 0)
      .def("ctc_log_probs", &Recognizer::CtcLogProbs, py::arg("features"))
      .def_property_readonly("feature_dim", &Recognizer::feature_dim);
}
