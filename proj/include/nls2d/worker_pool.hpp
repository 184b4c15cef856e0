#pragma once

#include <condition_variable>
#include <functional>
#include <mutex>
#include <queue>
#include <thread>
#include <vector>

namespace nls2d {

/// Small fixed pool for the independent per-stage factorizations and solves.
/// With fewer than two workers every task runs inline on the caller; results
/// are bit-identical either way because tasks share no mutable state.
class WorkerPool {
public:
    explicit WorkerPool(int workers);
    ~WorkerPool();

    WorkerPool(const WorkerPool&) = delete;
    WorkerPool& operator=(const WorkerPool&) = delete;

    int workers() const { return static_cast<int>(threads_.size()); }

    /// Runs all tasks and waits for completion; rethrows the first exception.
    void run_all(std::vector<std::function<void()>> tasks);

private:
    void worker_loop();

    std::vector<std::thread> threads_;
    std::mutex mutex_;
    std::condition_variable cv_task_;
    std::condition_variable cv_done_;
    std::queue<std::function<void()>> queue_;
    int in_flight_ = 0;
    bool stop_ = false;
    std::exception_ptr error_;
};

}  // namespace nls2d
