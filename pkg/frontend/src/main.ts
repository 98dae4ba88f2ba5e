import { ApiClient } from "./api.js";
import { SessionStore } from "./session.js";
import { mount } from "./ui.js";

declare global {
  interface Window {
    API_BASE?: string;
  }
}

const base = window.API_BASE ?? "http://127.0.0.1:8000";
const store = new SessionStore(new ApiClient(base));
const root = document.getElementById("app");
if (!root) throw new Error("missing #app element");
mount(root, store);
void store.loadModels();
