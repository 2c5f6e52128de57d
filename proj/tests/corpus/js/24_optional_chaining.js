const cfg = window.config ?? {};
const val = cfg?.nested?.fn?.(() => 1) ?? (x => x)(2);
cfg.handler ||= function () { return 'or-assign'; };
cfg.other &&= () => 'and-assign';
cfg.third ??= function named() {};
const big = 10n ** 3n;
const num = 1_000_000;
const cls = class Named { m() {} };
const anonCls = class { static s() {} };
