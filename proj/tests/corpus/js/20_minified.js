!function(e,t){"use strict";var n=function(e){return e+1},r=e=>e*2,o={a(){return 1},get b(){return 2}};function i(){return n(r(1))}t.x=i}(window,{});var u=function(){return function(){return()=>0}};
