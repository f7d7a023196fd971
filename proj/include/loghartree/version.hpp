#ifndef LOGHARTREE_VERSION_HPP
#define LOGHARTREE_VERSION_HPP

namespace loghartree {

inline constexpr const char* version_string = "0.1.0";

}  // namespace loghartree

#endif
