/* vim: set sw=4 sts=4 et foldmethod=syntax : */

#ifndef CANVDW_GUARD_VERSION_HH
#define CANVDW_GUARD_VERSION_HH 1

namespace canvdw
{
    inline constexpr const char * library_version = "0.1.0";
}

#endif
