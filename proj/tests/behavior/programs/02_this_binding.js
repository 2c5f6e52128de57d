var obj = {
  name: "obj",
  plain: function () { return this && this.name; },
  method() { return this.name; },
  arrowInside() { var f = () => this.name; return f(); }
};
function free() { return typeof this; }
out.push(obj.plain(), obj.method(), obj.arrowInside());
out.push(obj.plain.call({ name: "other" }), obj.method.apply({ name: "applied" }));
var bound = obj.method.bind({ name: "bound" });
out.push(bound(), free());
