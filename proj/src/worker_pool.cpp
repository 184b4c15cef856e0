#include "nls2d/worker_pool.hpp"

namespace nls2d {

WorkerPool::WorkerPool(int workers) {
    const int n = workers > 1 ? workers : 0;
    threads_.reserve(n);
    for (int i = 0; i < n; ++i) threads_.emplace_back([this] { worker_loop(); });
}

WorkerPool::~WorkerPool() {
    {
        std::lock_guard lock(mutex_);
        stop_ = true;
    }
    cv_task_.notify_all();
    for (auto& t : threads_) t.join();
}

void WorkerPool::worker_loop() {
    for (;;) {
        std::function<void()> task;
        {
            std::unique_lock lock(mutex_);
            cv_task_.wait(lock, [this] { return stop_ || !queue_.empty(); });
            if (queue_.empty()) {
                if (stop_) return;
                continue;
            }
            task = std::move(queue_.front());
            queue_.pop();
        }
        std::exception_ptr err;
        try {
            task();
        } catch (...) {
            err = std::current_exception();
        }
        {
            std::lock_guard lock(mutex_);
            if (err && !error_) error_ = err;
            --in_flight_;
        }
        cv_done_.notify_all();
    }
}

void WorkerPool::run_all(std::vector<std::function<void()>> tasks) {
    if (threads_.empty()) {
        for (auto& t : tasks) t();
        return;
    }
    {
        std::lock_guard lock(mutex_);
        error_ = nullptr;
        in_flight_ = static_cast<int>(tasks.size());
        for (auto& t : tasks) queue_.push(std::move(t));
    }
    cv_task_.notify_all();
    std::unique_lock lock(mutex_);
    cv_done_.wait(lock, [this] { return in_flight_ == 0; });
    if (error_) std::rethrow_exception(error_);
}

}  // namespace nls2d
