#include "zlab/zlab.h"

#include <cstring>
#include <string>

#include "zlab/experiment.hpp"

struct zlab_signal {
  zlab::SampledSignal s;
};
struct zlab_singular_set {
  zlab::SingularSet xi;
};
struct zlab_weight {
  zlab::Weight w;
};

namespace {

thread_local std::string last_error;

zlab_status fail(zlab_status s, const std::string& msg) {
  last_error = msg;
  return s;
}

template <class F>
zlab_status guarded(F&& body) {
  try {
    last_error.clear();
    body();
    return ZLAB_OK;
  } catch (const zlab::Error& e) {
    return fail(static_cast<zlab_status>(static_cast<int>(e.code()) + 1), e.what());
  } catch (const std::exception& e) {
    return fail(ZLAB_E_INTERNAL, e.what());
  } catch (...) {
    return fail(ZLAB_E_INTERNAL, "unknown exception");
  }
}

#define ZLAB_REQUIRE(p) \
  if (!(p)) return fail(ZLAB_E_NULL_ARGUMENT, "null argument: " #p)

}  // namespace

extern "C" {

const char* zlab_version(void) { return zlab::version(); }

const char* zlab_last_error(void) { return last_error.c_str(); }

const char* zlab_status_name(zlab_status s) {
  if (s == ZLAB_OK) return "Ok";
  if (s == ZLAB_E_NULL_ARGUMENT) return "NullArgument";
  if (s == ZLAB_E_INTERNAL) return "Internal";
  if (s > ZLAB_OK && s < ZLAB_E_NULL_ARGUMENT) return zlab::error_name(static_cast<zlab::ErrorCode>(s - 1));
  return "Unknown";
}

zlab_status zlab_set_threads(unsigned k) {
  return guarded([&] { zlab::set_thread_count(k); });
}

zlab_status zlab_signal_create(const double* re, const double* im, size_t n, double a, double b, zlab_signal** out) {
  ZLAB_REQUIRE(re);
  ZLAB_REQUIRE(out);
  return guarded([&] {
    std::vector<zlab::cplx> v(n);
    for (size_t j = 0; j < n; ++j) v[j] = zlab::cplx(re[j], im ? im[j] : 0.0);
    *out = new zlab_signal{zlab::SampledSignal(std::move(v), a, b)};
  });
}

void zlab_signal_destroy(zlab_signal* f) { delete f; }

size_t zlab_signal_size(const zlab_signal* f) { return f ? f->s.size() : 0; }

zlab_status zlab_signal_samples(const zlab_signal* f, double* re, double* im) {
  ZLAB_REQUIRE(f);
  ZLAB_REQUIRE(re);
  for (size_t j = 0; j < f->s.size(); ++j) {
    re[j] = f->s[j].real();
    if (im) im[j] = f->s[j].imag();
  }
  return ZLAB_OK;
}

zlab_status zlab_signal_norm2(const zlab_signal* f, double* out) {
  ZLAB_REQUIRE(f);
  ZLAB_REQUIRE(out);
  *out = f->s.norm2();
  return ZLAB_OK;
}

zlab_status zlab_singular_set_create(const double* points, size_t n, double window_a, double window_b,
                                     zlab_singular_set** out) {
  ZLAB_REQUIRE(points || n == 0);
  ZLAB_REQUIRE(out);
  return guarded([&] {
    *out = new zlab_singular_set{zlab::SingularSet(std::vector<double>(points, points + n), {window_a, window_b})};
  });
}

zlab_status zlab_singular_set_lacunary(double gamma, int tau, double theta, int depth, double window_a,
                                       double window_b, zlab_singular_set** out) {
  ZLAB_REQUIRE(out);
  return guarded([&] {
    *out = new zlab_singular_set{zlab::lacunary_set(gamma, tau, theta, depth, {window_a, window_b})};
  });
}

zlab_status zlab_singular_set_from_json(const char* text, zlab_singular_set** out) {
  ZLAB_REQUIRE(text);
  ZLAB_REQUIRE(out);
  return guarded([&] {
    zlab::json j;
    try {
      j = zlab::json::parse(text);
    } catch (const zlab::json::exception& e) {
      throw zlab::Error(zlab::ErrorCode::ConfigError, e.what());
    }
    *out = new zlab_singular_set{zlab::singular_set_from_json(j)};
  });
}

void zlab_singular_set_destroy(zlab_singular_set* xi) { delete xi; }

size_t zlab_singular_set_size(const zlab_singular_set* xi) { return xi ? xi->xi.size() : 0; }

zlab_status zlab_singular_set_points(const zlab_singular_set* xi, double* out) {
  ZLAB_REQUIRE(xi);
  ZLAB_REQUIRE(out);
  std::copy(xi->xi.points().begin(), xi->xi.points().end(), out);
  return ZLAB_OK;
}

zlab_status zlab_local_average(const zlab_signal* f, double a, double b, double p, double s, double* out) {
  ZLAB_REQUIRE(f);
  ZLAB_REQUIRE(out);
  return guarded([&] { *out = zlab::local_average(f->s, {a, b}, zlab::YoungFunction{p, s}); });
}

zlab_status zlab_apply_multiplier(const zlab_signal* f, const double* m_re, const double* m_im, zlab_signal** out) {
  ZLAB_REQUIRE(f);
  ZLAB_REQUIRE(m_re);
  ZLAB_REQUIRE(out);
  return guarded([&] {
    std::vector<zlab::cplx> m(f->s.size());
    for (size_t q = 0; q < m.size(); ++q) m[q] = zlab::cplx(m_re[q], m_im ? m_im[q] : 0.0);
    *out = new zlab_signal{zlab::apply_multiplier(m, f->s)};
  });
}

zlab_status zlab_rough_square_function(const zlab_singular_set* xi, const zlab_signal* f, zlab_signal** out) {
  ZLAB_REQUIRE(xi);
  ZLAB_REQUIRE(f);
  ZLAB_REQUIRE(out);
  return guarded([&] {
    *out = new zlab_signal{
        zlab::rough_square_function(xi->xi, std::vector<zlab::cplx>(f->s.size(), zlab::cplx(1.0)), f->s)};
  });
}

zlab_status zlab_zygmund_constant(const int64_t* k, size_t n, double p, double s, uint64_t seed, double* out) {
  ZLAB_REQUIRE(k);
  ZLAB_REQUIRE(out);
  return guarded([&] {
    zlab::OptimizerConfig cfg;
    cfg.seed = seed;
    *out = zlab::zygmund_constant(std::vector<std::int64_t>(k, k + n), zlab::YoungFunction{p, s}, cfg).value;
  });
}

zlab_status zlab_weight_create(const double* w, size_t n, double a, double b, zlab_weight** out) {
  ZLAB_REQUIRE(w);
  ZLAB_REQUIRE(out);
  return guarded([&] { *out = new zlab_weight{zlab::Weight::custom(std::vector<double>(w, w + n), a, b)}; });
}

void zlab_weight_destroy(zlab_weight* w) { delete w; }

zlab_status zlab_weight_characteristic(const zlab_weight* w, zlab_char_kind kind, double param, double* out) {
  ZLAB_REQUIRE(w);
  ZLAB_REQUIRE(out);
  if (kind < ZLAB_CHAR_AP || kind > ZLAB_CHAR_RH) return fail(ZLAB_E_INVALID_ARGUMENT, "unknown characteristic");
  return guarded([&] { *out = zlab::characteristic(w->w, static_cast<zlab::CharKind>(kind), param).value; });
}

zlab_status zlab_is_sparse(const int* n, const int64_t* k, const int* shift, size_t count, double eta, int* sparse,
                           double* packing) {
  ZLAB_REQUIRE(count == 0 || (n && k && shift));
  ZLAB_REQUIRE(sparse);
  return guarded([&] {
    std::vector<zlab::DyadicInterval> s;
    for (size_t i = 0; i < count; ++i) s.push_back({n[i], k[i], shift[i]});
    const zlab::SparseCheck c = zlab::is_sparse(s, eta);
    *sparse = c.sparse ? 1 : 0;
    if (packing) *packing = c.packing;
  });
}

size_t zlab_command_count(void) { return zlab::experiment_commands().size(); }

const char* zlab_command_name(size_t i) {
  const auto& names = zlab::experiment_commands();
  return i < names.size() ? names[i].c_str() : nullptr;
}

int zlab_run(const char* command, const char* config_path, const char* out_dir, int has_seed, uint64_t seed,
             unsigned threads, char* diag, size_t diag_cap) {
  std::string msg;
  int code = 1;
  if (!command || !config_path || !out_dir) {
    msg = "command, config path and output directory are required";
  } else {
    try {
      zlab::RunOptions opt;
      if (has_seed) opt.seed = seed;
      opt.threads = threads;
      code = zlab::run_command(command, config_path, opt, out_dir, msg);
    } catch (const std::exception& e) {
      msg = e.what();
      code = 1;
    }
  }
  last_error = msg;
  if (diag && diag_cap > 0) {
    const size_t len = std::min(msg.size(), diag_cap - 1);
    std::memcpy(diag, msg.data(), len);
    diag[len] = '\0';
  }
  return code;
}

}  // extern "C"
