#ifndef CBLB_ERRORS_HPP
#define CBLB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cblb {

struct error : std::runtime_error {
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

struct shape_error : error {
    using error::error;
};
struct symmetry_error : error {
    using error::error;
};
struct mean_error : error {
    using error::error;
};
struct step_error : error {
    using error::error;
};
struct remap_error : error {
    using error::error;
};
struct generator_error : error {
    using error::error;
};
struct singular_frame_error : error {
    using error::error;
};
struct config_error : error {
    using error::error;
};
struct bracket_error : error {
    using error::error;
};
struct domain_error : error {
    using error::error;
};
struct format_error : error {
    using error::error;
};
struct clock_error : error {
    using error::error;
};
struct accuracy_error : error {
    using error::error;
};

}  // namespace cblb

#endif
