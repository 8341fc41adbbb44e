#include "krv/model_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "krv/error.hpp"

namespace krv {

std::string to_string(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::knn: return "knn";
    case LearnerKind::wnn: return "wnn";
    case LearnerKind::kernn: return "kernn";
    case LearnerKind::krv: return "krv";
    case LearnerKind::rvm_bern: return "rvm_bern";
    case LearnerKind::rvm_gauss: return "rvm_gauss";
  }
  throw Error("unknown learner kind");
}

LearnerKind learner_from_string(const std::string& name) {
  if (name == "knn") return LearnerKind::knn;
  if (name == "wnn") return LearnerKind::wnn;
  if (name == "kernn") return LearnerKind::kernn;
  if (name == "krv") return LearnerKind::krv;
  if (name == "rvm_bern") return LearnerKind::rvm_bern;
  if (name == "rvm_gauss") return LearnerKind::rvm_gauss;
  throw Error("unknown learner '" + name + "'");
}

namespace {

std::string hex(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%a", v);
  return buf;
}

void write_vector(std::ostream& os, const std::string& name, const Eigen::VectorXd& v) {
  os << "vector " << name << ' ' << v.size() << '\n';
  for (Eigen::Index i = 0; i < v.size(); ++i) os << hex(v(i)) << (i + 1 < v.size() ? ' ' : '\n');
  if (v.size() == 0) os << '\n';
}

void write_ivector(std::ostream& os, const std::string& name, const std::vector<int>& v) {
  os << "ivector " << name << ' ' << v.size() << '\n';
  for (std::size_t i = 0; i < v.size(); ++i) os << v[i] << (i + 1 < v.size() ? ' ' : '\n');
  if (v.empty()) os << '\n';
}

void write_matrix(std::ostream& os, const std::string& name, const Eigen::MatrixXd& m) {
  os << "matrix " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      os << hex(m(r, c)) << (c + 1 < m.cols() ? ' ' : '\n');
    if (m.cols() == 0) os << '\n';
  }
}

void write_kernel(std::ostream& os, const KernelSpec& k) {
  if (k.family == KernelSpec::Family::gaussian)
    os << "kernel gaussian " << hex(k.width) << '\n';
  else
    os << "kernel polynomial " << k.order << '\n';
}

class Reader {
 public:
  explicit Reader(const std::string& path) : in_(path), path_(path) {
    if (!in_) throw Error("cannot open model file '" + path + "'");
  }

  std::string line() {
    std::string l;
    if (!std::getline(in_, l)) throw Error(path_ + ": truncated model file");
    if (!l.empty() && l.back() == '\r') l.pop_back();
    return l;
  }

  // "<keyword> rest..." with the keyword verified.
  std::string expect(const std::string& keyword) {
    std::string l = line();
    if (l.rfind(keyword, 0) != 0)
      throw Error(path_ + ": expected '" + keyword + "', got '" + l + "'");
    std::size_t pos = keyword.size();
    while (pos < l.size() && l[pos] == ' ') ++pos;
    return l.substr(pos);
  }

  double parse_double(const std::string& tok) {
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0')
      throw Error(path_ + ": bad number '" + tok + "'");
    return v;
  }

  Eigen::VectorXd read_vector(const std::string& name) {
    std::istringstream hdr(expect("vector"));
    std::string got;
    Eigen::Index n;
    hdr >> got >> n;
    if (got != name || hdr.fail()) throw Error(path_ + ": expected vector '" + name + "'");
    Eigen::VectorXd v(n);
    std::istringstream body(line());
    std::string tok;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!(body >> tok)) throw Error(path_ + ": short vector '" + name + "'");
      v(i) = parse_double(tok);
    }
    return v;
  }

  std::vector<int> read_ivector(const std::string& name) {
    std::istringstream hdr(expect("ivector"));
    std::string got;
    std::size_t n;
    hdr >> got >> n;
    if (got != name || hdr.fail()) throw Error(path_ + ": expected ivector '" + name + "'");
    std::vector<int> v(n);
    std::istringstream body(line());
    for (std::size_t i = 0; i < n; ++i)
      if (!(body >> v[i])) throw Error(path_ + ": short ivector '" + name + "'");
    return v;
  }

  Eigen::MatrixXd read_matrix(const std::string& name) {
    std::istringstream hdr(expect("matrix"));
    std::string got;
    Eigen::Index rows, cols;
    hdr >> got >> rows >> cols;
    if (got != name || hdr.fail()) throw Error(path_ + ": expected matrix '" + name + "'");
    Eigen::MatrixXd m(rows, cols);
    std::string tok;
    for (Eigen::Index r = 0; r < rows; ++r) {
      std::istringstream body(line());
      for (Eigen::Index c = 0; c < cols; ++c) {
        if (!(body >> tok)) throw Error(path_ + ": short matrix '" + name + "'");
        m(r, c) = parse_double(tok);
      }
    }
    return m;
  }

  KernelSpec read_kernel() {
    std::istringstream hdr(expect("kernel"));
    std::string family, param;
    hdr >> family >> param;
    if (family == "gaussian") return KernelSpec::gaussian(parse_double(param));
    if (family == "polynomial") return KernelSpec::polynomial(std::atoi(param.c_str()));
    throw Error(path_ + ": unknown kernel family '" + family + "'");
  }

 private:
  std::ifstream in_;
  std::string path_;
};

void write_sbl(std::ostream& os, const SblModel& m) {
  os << "sbl " << (m.likelihood == Likelihood::bernoulli ? "bernoulli" : "gaussian") << ' '
     << hex(m.noise_var) << '\n';
  write_ivector(os, "active", m.active);
  write_vector(os, "weights", m.weights);
  write_vector(os, "alphas", m.alphas);
}

SblModel read_sbl(Reader& r) {
  std::istringstream hdr(r.expect("sbl"));
  std::string lik, noise;
  hdr >> lik >> noise;
  SblModel m;
  if (lik == "bernoulli")
    m.likelihood = Likelihood::bernoulli;
  else if (lik == "gaussian")
    m.likelihood = Likelihood::gaussian;
  else
    throw Error("model file: unknown likelihood '" + lik + "'");
  m.noise_var = r.parse_double(noise);
  m.active = r.read_ivector("active");
  m.weights = r.read_vector("weights");
  m.alphas = r.read_vector("alphas");
  m.covariance = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(m.active.size()),
                                           static_cast<Eigen::Index>(m.active.size()));
  return m;
}

Dataset memory_as_dataset(const MemoryModel& mem, const std::vector<std::string>& label_names) {
  Dataset d;
  d.name = "model";
  d.instances = mem.instances;
  d.labels = mem.labels;
  d.label_names = label_names;
  d.attribute_kinds.assign(static_cast<std::size_t>(mem.instances.cols()), AttrKind::real);
  return d;
}

}  // namespace

void save_model(const TrainedModel& model, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write model file '" + path + "'");

  os << "krv-model 1\n";
  os << "learner " << to_string(model.kind) << '\n';
  os << "k " << model.k << '\n';
  os << "classes " << model.num_classes << '\n';
  for (const auto& name : model.label_names) os << "label " << name << '\n';

  os << "scaler " << (model.has_scaler ? 1 : 0) << '\n';
  if (model.has_scaler) {
    write_vector(os, "mean", model.scaler.mean);
    write_vector(os, "scale", model.scaler.scale);
  }

  switch (model.kind) {
    case LearnerKind::knn:
    case LearnerKind::wnn:
    case LearnerKind::kernn:
      if (model.kind == LearnerKind::kernn) write_kernel(os, model.kernel);
      write_matrix(os, "instances", model.memory.instances);
      write_ivector(os, "labels", model.memory.labels);
      if (model.kind == LearnerKind::wnn) write_vector(os, "attr_weights", model.memory.weights);
      break;
    case LearnerKind::krv: {
      const KrvModel& m = model.krv_model;
      write_kernel(os, m.kernel);
      write_matrix(os, "anchors", m.anchors);
      write_ivector(os, "retained_dims", m.retained_dims);
      write_vector(os, "sparse_weights", m.sparse_weights);
      write_matrix(os, "train_features", m.train_features);
      write_ivector(os, "train_labels", m.train_labels);
      break;
    }
    case LearnerKind::rvm_bern:
    case LearnerKind::rvm_gauss: {
      const RvmClassifier& m = model.rvm;
      write_kernel(os, m.kernel);
      write_matrix(os, "anchors", m.anchors);
      os << "fallback " << m.fallback_class << '\n';
      os << "submodels " << m.submodels.size() << '\n';
      for (std::size_t s = 0; s < m.submodels.size(); ++s) {
        os << "trained " << static_cast<int>(m.trained[s]) << '\n';
        if (m.trained[s]) write_sbl(os, m.submodels[s]);
      }
      break;
    }
  }
  os << "end\n";
  if (!os) throw Error("failed writing model file '" + path + "'");
}

TrainedModel load_model(const std::string& path) {
  Reader r(path);
  if (r.line() != "krv-model 1") throw Error(path + ": not a version-1 model file");

  TrainedModel model;
  model.kind = learner_from_string(r.expect("learner"));
  model.k = std::atoi(r.expect("k").c_str());
  model.num_classes = std::atoi(r.expect("classes").c_str());
  if (model.num_classes < 2) throw Error(path + ": bad class count");
  for (int c = 0; c < model.num_classes; ++c) model.label_names.push_back(r.expect("label"));

  model.has_scaler = r.expect("scaler") == "1";
  if (model.has_scaler) {
    model.scaler.mean = r.read_vector("mean");
    model.scaler.scale = r.read_vector("scale");
  }

  switch (model.kind) {
    case LearnerKind::knn:
    case LearnerKind::wnn:
    case LearnerKind::kernn:
      if (model.kind == LearnerKind::kernn) {
        model.kernel = r.read_kernel();
        model.has_kernel = true;
      }
      model.memory.instances = r.read_matrix("instances");
      model.memory.labels = r.read_ivector("labels");
      if (model.kind == LearnerKind::wnn) model.memory.weights = r.read_vector("attr_weights");
      break;
    case LearnerKind::krv: {
      KrvModel& m = model.krv_model;
      m.kernel = r.read_kernel();
      model.kernel = m.kernel;
      model.has_kernel = true;
      m.anchors = r.read_matrix("anchors");
      m.retained_dims = r.read_ivector("retained_dims");
      m.sparse_weights = r.read_vector("sparse_weights");
      m.train_features = r.read_matrix("train_features");
      m.train_labels = r.read_ivector("train_labels");
      m.num_classes = model.num_classes;
      m.k = model.k;
      break;
    }
    case LearnerKind::rvm_bern:
    case LearnerKind::rvm_gauss: {
      RvmClassifier& m = model.rvm;
      m.kernel = r.read_kernel();
      model.kernel = m.kernel;
      model.has_kernel = true;
      m.likelihood =
          (model.kind == LearnerKind::rvm_bern) ? Likelihood::bernoulli : Likelihood::gaussian;
      m.anchors = r.read_matrix("anchors");
      m.num_classes = model.num_classes;
      m.fallback_class = std::atoi(r.expect("fallback").c_str());
      std::size_t n_sub = static_cast<std::size_t>(std::atoi(r.expect("submodels").c_str()));
      m.submodels.resize(n_sub);
      m.trained.assign(n_sub, 0);
      for (std::size_t s = 0; s < n_sub; ++s) {
        m.trained[s] = static_cast<char>(r.expect("trained") == "1");
        if (m.trained[s]) m.submodels[s] = read_sbl(r);
      }
      break;
    }
  }
  if (r.line() != "end") throw Error(path + ": missing end marker");
  return model;
}

Eigen::VectorXd TrainedModel::preprocess(const Eigen::VectorXd& raw_row) const {
  return has_scaler ? scaler.apply_row(raw_row) : raw_row;
}

int TrainedModel::predict_class(const Eigen::VectorXd& raw_row) const {
  Eigen::VectorXd row = preprocess(raw_row);
  switch (kind) {
    case LearnerKind::knn:
      return knn_predict(memory_as_dataset(memory, label_names), row, k);
    case LearnerKind::wnn:
      return wnn_predict(memory_as_dataset(memory, label_names), row, memory.weights, k);
    case LearnerKind::kernn:
      return kernn_predict(memory_as_dataset(memory, label_names), row, kernel, k);
    case LearnerKind::krv:
      return krv_predict(krv_model, row);
    case LearnerKind::rvm_bern:
    case LearnerKind::rvm_gauss:
      return rvm_predict(rvm, row);
  }
  throw Error("unknown learner kind");
}

const std::string& TrainedModel::predict_label(const Eigen::VectorXd& raw_row) const {
  int cls = predict_class(raw_row);
  return label_names.at(static_cast<std::size_t>(cls));
}

}  // namespace krv
