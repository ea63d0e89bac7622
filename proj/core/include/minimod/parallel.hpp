#pragma once

#include <thread>
#include <vector>

namespace minimod {

/// Deterministic task runner: task t goes to worker t % nthreads, workers
/// process their tasks in index order. Every task must write a disjoint set
/// of points, so results are independent of the schedule.
class TaskRunner {
public:
    explicit TaskRunner(int nthreads) : nthreads_(nthreads < 1 ? 1 : nthreads) {}

    int nthreads() const { return nthreads_; }

    template <typename F>
    void run(int ntasks, F&& f) const {
        if (nthreads_ == 1 || ntasks <= 1) {
            for (int t = 0; t < ntasks; ++t) f(t);
            return;
        }
        std::vector<std::thread> workers;
        workers.reserve(nthreads_);
        for (int w = 0; w < nthreads_; ++w)
            workers.emplace_back([&, w] {
                for (int t = w; t < ntasks; t += nthreads_) f(t);
            });
        for (auto& th : workers) th.join();
    }

private:
    int nthreads_;
};

} // namespace minimod
