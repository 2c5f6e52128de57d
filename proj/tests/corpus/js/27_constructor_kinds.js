class A {
  constructor() { this.a = 1; }
}
class B extends A {
  constructor() {
    super();
    this.fn = () => this.a;
  }
  'constructor2'() {}
  static constructor() { return 'static method named constructor'; }
}
class C {
  ['constructor']() { return 'computed, a plain method'; }
}
function OldStyle() {
  this.x = 1;
}
OldStyle.prototype.method = function () { return this.x; };
