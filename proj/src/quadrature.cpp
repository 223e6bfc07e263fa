#include "invisim/quadrature.hpp"

#include <boost/math/special_functions/legendre.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <thread>

namespace invisim {

namespace {

const Rule1D& gauss_legendre_locked(int n) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<Rule1D>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end())
        return *it->second;
    if (n < 1)
        throw Error("gauss_legendre: need at least one node");
    auto rule = std::make_unique<Rule1D>();
    std::vector<double> zeros = boost::math::legendre_p_zeros<double>(n);
    std::vector<std::pair<double, double>> xw;
    for (double z : zeros) {
        double dp = boost::math::legendre_p_prime<double>(n, z);
        double w = 2.0 / ((1.0 - z * z) * dp * dp);
        xw.emplace_back(z, w);
        if (z != 0.0)
            xw.emplace_back(-z, w);
    }
    std::sort(xw.begin(), xw.end());
    for (auto [x, w] : xw) {
        rule->x.push_back(x);
        rule->w.push_back(w);
    }
    auto& ref = *rule;
    cache.emplace(n, std::move(rule));
    return ref;
}

} // namespace

const Rule1D& gauss_legendre(int n) {
    constexpr int small = 256;
    thread_local std::array<const Rule1D*, small> fast{};
    if (n > 0 && n < small) {
        if (!fast[n])
            fast[n] = &gauss_legendre_locked(n);
        return *fast[n];
    }
    return gauss_legendre_locked(n);
}

void append_gauss(Rule1D& rule, double a, double b, int n) {
    const Rule1D& g = gauss_legendre(n);
    const double h = 0.5 * (b - a), c = 0.5 * (a + b);
    for (size_t i = 0; i < g.size(); ++i) {
        rule.x.push_back(c + h * g.x[i]);
        rule.w.push_back(h * g.w[i]);
    }
}

long oscillatory_panels(double a, double b, double rate, double ppw, int panelNodes) {
    if (!(b > a))
        return 0;
    double phase = rate * (b - a);
    double nodes = phase / (2.0 * pi) * ppw;
    return std::max(1L, static_cast<long>(std::ceil(nodes / panelNodes)));
}

void append_oscillatory(Rule1D& rule, double a, double b, double rate, double ppw, int panelNodes) {
    long panels = oscillatory_panels(a, b, rate, ppw, panelNodes);
    for (long p = 0; p < panels; ++p) {
        double lo = a + (b - a) * p / panels;
        double hi = a + (b - a) * (p + 1) / panels;
        append_gauss(rule, lo, hi, panelNodes);
    }
}

int default_threads() {
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

void parallel_for(size_t n, const std::function<void(size_t)>& fn, int threads) {
    if (threads <= 0)
        threads = default_threads();
    threads = static_cast<int>(std::min<size_t>(threads, n));
    if (threads <= 1) {
        for (size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr failure;
    std::mutex failMu;
    auto worker = [&] {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= n)
                return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failMu);
                if (!failure)
                    failure = std::current_exception();
                next = n;
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back(worker);
    for (auto& t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);
}

} // namespace invisim
