(function () { return 1; })();
(function () { return 2; }());
!function () { return 3; }();
void function named() { return 4; }();
(() => 5)();
(async () => 6)();
+function () {}();
new function () { this.x = 7; }();
