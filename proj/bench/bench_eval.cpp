// Serial vs OpenMP evaluation of the per-patient scatter report.

#include <chrono>
#include <cstdio>

#include <omp.h>

#include <CLI11.hpp>

#include "latalign/eval_report.hpp"
#include "latalign/synthetic.hpp"

using namespace latalign;

namespace {

template <class F>
double best_of(int reps, F&& f) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
}

bool same(const ScatterReport& a, const ScatterReport& b) {
    if (a.metrics.size() != b.metrics.size()) return false;
    for (std::size_t i = 0; i < a.metrics.size(); ++i) {
        if (a.metrics[i].patient_id != b.metrics[i].patient_id || a.metrics[i].delta_rs != b.metrics[i].delta_rs ||
            a.metrics[i].delta_ode != b.metrics[i].delta_ode)
            return false;
    }
    return a.summary.excluded == b.summary.excluded;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bench_eval"};
    std::size_t patients = 2000;
    int reps = 5;
    app.add_option("--patients", patients, "Synthetic cohort size");
    app.add_option("--reps", reps, "Repetitions (best time is reported)");
    CLI11_PARSE(app, argc, argv);

    GeneratorConfig g;
    g.n_patients = patients;
    const Cohort cohort = preprocess(generate_synthetic(g).cohort);
    const ModelState model = init_model(cohort, train_preset("synthetic"));
    const auto data = prepare_patients(cohort, model.baseline_stats);

    ScatterReport serial, parallel;
    const double ts = best_of(reps, [&] { serial = scatter_report_serial(model, data); });
    const double tp = best_of(reps, [&] { parallel = scatter_report(model, data); });
    std::printf("patients %zu threads %d\n", data.size(), omp_get_max_threads());
    std::printf("serial   %.4f s\n", ts);
    std::printf("openmp   %.4f s  speedup %.2fx\n", tp, ts / tp);
    std::printf("identical %s\n", same(serial, parallel) ? "yes" : "NO");
    return same(serial, parallel) ? 0 : 1;
}
