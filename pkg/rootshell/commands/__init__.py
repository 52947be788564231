from . import exponent, mc, rootsys, semidense, spherical, tables

routers = (
    rootsys.router,
    semidense.router,
    tables.router,
    exponent.router,
    spherical.router,
    mc.router,
)
