/* @ts-self-types="./wavelock_web.d.ts" */

export class DriftView {
    static __wrap(ptr) {
        const obj = Object.create(DriftView.prototype);
        obj.__wbg_ptr = ptr;
        DriftViewFinalization.register(obj, obj.__wbg_ptr, obj);
        return obj;
    }
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        DriftViewFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_driftview_free(ptr, 0);
    }
    /**
     * @returns {Float64Array}
     */
    closed_adev() {
        const ret = wasm.driftview_closed_adev(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {number}
     */
    get closed_p2p_pm() {
        const ret = wasm.driftview_closed_p2p_pm(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {Float64Array}
     */
    closed_pm() {
        const ret = wasm.driftview_closed_pm(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {number}
     */
    get closed_sd_pm() {
        const ret = wasm.driftview_closed_sd_pm(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {Float64Array}
     */
    open_adev() {
        const ret = wasm.driftview_open_adev(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {number}
     */
    get open_p2p_pm() {
        const ret = wasm.driftview_open_p2p_pm(this.__wbg_ptr);
        return ret;
    }
    /**
     * Measured deviation from the degenerate wavelength, pm.
     * @returns {Float64Array}
     */
    open_pm() {
        const ret = wasm.driftview_open_pm(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {number}
     */
    get open_sd_pm() {
        const ret = wasm.driftview_open_sd_pm(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {Float64Array}
     */
    taus_s() {
        const ret = wasm.driftview_taus_s(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {Float64Array}
     */
    times_h() {
        const ret = wasm.driftview_times_h(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
}
if (Symbol.dispose) DriftView.prototype[Symbol.dispose] = DriftView.prototype.free;

export class HistogramView {
    static __wrap(ptr) {
        const obj = Object.create(HistogramView.prototype);
        obj.__wbg_ptr = ptr;
        HistogramViewFinalization.register(obj, obj.__wbg_ptr, obj);
        return obj;
    }
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        HistogramViewFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_histogramview_free(ptr, 0);
    }
    /**
     * @returns {number}
     */
    get bin_width_ps() {
        const ret = wasm.histogramview_bin_width_ps(this.__wbg_ptr);
        return ret;
    }
    /**
     * Counts per display bin.
     * @returns {Float64Array}
     */
    counts() {
        const ret = wasm.histogramview_counts(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * Fitted model on the same display bins.
     * @returns {Float64Array}
     */
    model() {
        const ret = wasm.histogramview_model(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {number}
     */
    get start_ps() {
        const ret = wasm.histogramview_start_ps(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get tau0_ps() {
        const ret = wasm.histogramview_tau0_ps(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get tau0_stderr_ps() {
        const ret = wasm.histogramview_tau0_stderr_ps(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get true_tau0_ps() {
        const ret = wasm.histogramview_true_tau0_ps(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get width_ps() {
        const ret = wasm.histogramview_width_ps(this.__wbg_ptr);
        return ret;
    }
}
if (Symbol.dispose) HistogramView.prototype[Symbol.dispose] = HistogramView.prototype.free;

export class StepView {
    static __wrap(ptr) {
        const obj = Object.create(StepView.prototype);
        obj.__wbg_ptr = ptr;
        StepViewFinalization.register(obj, obj.__wbg_ptr, obj);
        return obj;
    }
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        StepViewFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_stepview_free(ptr, 0);
    }
    /**
     * @returns {number}
     */
    get deadband_c() {
        const ret = wasm.stepview_deadband_c(this.__wbg_ptr);
        return ret;
    }
    /**
     * 1 where the cycle fell inside the deadband.
     * @returns {Uint8Array}
     */
    gated() {
        const ret = wasm.stepview_gated(this.__wbg_ptr);
        var v1 = getArrayU8FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 1, 1);
        return v1;
    }
    /**
     * Offset of the SPDC temperature from nominal after each cycle, degC.
     * @returns {Float64Array}
     */
    residual_c() {
        const ret = wasm.stepview_residual_c(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {Float64Array}
     */
    setpoint_c() {
        const ret = wasm.stepview_setpoint_c(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
}
if (Symbol.dispose) StepView.prototype[Symbol.dispose] = StepView.prototype.free;

/**
 * @param {number} hours
 * @param {number} seed
 * @param {number} kp
 * @param {number} ki
 * @param {number} kd
 * @param {number} tau_th_ps
 * @returns {DriftView}
 */
export function drift(hours, seed, kp, ki, kd, tau_th_ps) {
    const ret = wasm.drift(hours, seed, kp, ki, kd, tau_th_ps);
    if (ret[2]) {
        throw takeFromExternrefTable0(ret[1]);
    }
    return DriftView.__wrap(ret[0]);
}

/**
 * @param {number} lambda_nm
 * @param {number} pair_rate_hz
 * @param {number} integration_s
 * @param {number} seed
 * @param {number} rebin
 * @returns {HistogramView}
 */
export function histogram(lambda_nm, pair_rate_hz, integration_s, seed, rebin) {
    const ret = wasm.histogram(lambda_nm, pair_rate_hz, integration_s, seed, rebin);
    if (ret[2]) {
        throw takeFromExternrefTable0(ret[1]);
    }
    return HistogramView.__wrap(ret[0]);
}

/**
 * @param {number} step_c
 * @param {number} kp
 * @param {number} ki
 * @param {number} kd
 * @param {number} tau_th_ps
 * @param {number} cycles
 * @returns {StepView}
 */
export function stepResponse(step_c, kp, ki, kd, tau_th_ps, cycles) {
    const ret = wasm.stepResponse(step_c, kp, ki, kd, tau_th_ps, cycles);
    if (ret[2]) {
        throw takeFromExternrefTable0(ret[1]);
    }
    return StepView.__wrap(ret[0]);
}
function __wbg_get_imports() {
    const import0 = {
        __proto__: null,
        __wbg_Error_30c8987f7c2ed4e2: function(arg0, arg1) {
            const ret = Error(getStringFromWasm0(arg0, arg1));
            return ret;
        },
        __wbg___wbindgen_throw_41e9ee4f547fc59a: function(arg0, arg1) {
            throw new Error(getStringFromWasm0(arg0, arg1));
        },
        __wbindgen_init_externref_table: function() {
            const table = wasm.__wbindgen_externrefs;
            const offset = table.grow(4);
            table.set(0, undefined);
            table.set(offset + 0, undefined);
            table.set(offset + 1, null);
            table.set(offset + 2, true);
            table.set(offset + 3, false);
        },
    };
    return {
        __proto__: null,
        "./wavelock_web_bg.js": import0,
    };
}

const DriftViewFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_driftview_free(ptr, 1));
const HistogramViewFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_histogramview_free(ptr, 1));
const StepViewFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_stepview_free(ptr, 1));

function getArrayF64FromWasm0(ptr, len) {
    ptr = ptr >>> 0;
    return getFloat64ArrayMemory0().subarray(ptr / 8, ptr / 8 + len);
}

function getArrayU8FromWasm0(ptr, len) {
    ptr = ptr >>> 0;
    return getUint8ArrayMemory0().subarray(ptr / 1, ptr / 1 + len);
}

let cachedFloat64ArrayMemory0 = null;
function getFloat64ArrayMemory0() {
    if (cachedFloat64ArrayMemory0 === null || cachedFloat64ArrayMemory0.byteLength === 0) {
        cachedFloat64ArrayMemory0 = new Float64Array(wasm.memory.buffer);
    }
    return cachedFloat64ArrayMemory0;
}

function getStringFromWasm0(ptr, len) {
    return decodeText(ptr >>> 0, len);
}

let cachedUint8ArrayMemory0 = null;
function getUint8ArrayMemory0() {
    if (cachedUint8ArrayMemory0 === null || cachedUint8ArrayMemory0.byteLength === 0) {
        cachedUint8ArrayMemory0 = new Uint8Array(wasm.memory.buffer);
    }
    return cachedUint8ArrayMemory0;
}

function takeFromExternrefTable0(idx) {
    const value = wasm.__wbindgen_externrefs.get(idx);
    wasm.__externref_table_dealloc(idx);
    return value;
}

let cachedTextDecoder = new TextDecoder('utf-8', { ignoreBOM: true, fatal: true });
cachedTextDecoder.decode();
const MAX_SAFARI_DECODE_BYTES = 2146435072;
let numBytesDecoded = 0;
function decodeText(ptr, len) {
    numBytesDecoded += len;
    if (numBytesDecoded >= MAX_SAFARI_DECODE_BYTES) {
        cachedTextDecoder = new TextDecoder('utf-8', { ignoreBOM: true, fatal: true });
        cachedTextDecoder.decode();
        numBytesDecoded = len;
    }
    return cachedTextDecoder.decode(getUint8ArrayMemory0().subarray(ptr, ptr + len));
}

let wasmModule, wasmInstance, wasm;
function __wbg_finalize_init(instance, module) {
    wasmInstance = instance;
    wasm = instance.exports;
    wasmModule = module;
    cachedFloat64ArrayMemory0 = null;
    cachedUint8ArrayMemory0 = null;
    wasm.__wbindgen_start();
    return wasm;
}

async function __wbg_load(module, imports) {
    if (typeof Response === 'function' && module instanceof Response) {
        if (!module.ok) {
            throw new Error(`failed to fetch Wasm: ${module.status} ${module.statusText} fetching '${module.url}'`);
        }

        if (typeof WebAssembly.instantiateStreaming === 'function') {
            try {
                return await WebAssembly.instantiateStreaming(module, imports);
            } catch (e) {
                const validResponse = expectedResponseType(module.type);

                if (validResponse && module.headers.get('Content-Type') !== 'application/wasm') {
                    console.warn("`WebAssembly.instantiateStreaming` failed because your server does not serve Wasm with `application/wasm` MIME type. Falling back to `WebAssembly.instantiate` which is slower. Original error:\n", e);

                } else { throw e; }
            }
        }

        const bytes = await module.arrayBuffer();
        return await WebAssembly.instantiate(bytes, imports);
    } else {
        const instance = await WebAssembly.instantiate(module, imports);

        if (instance instanceof WebAssembly.Instance) {
            return { instance, module };
        } else {
            return instance;
        }
    }

    function expectedResponseType(type) {
        switch (type) {
            case 'basic': case 'cors': case 'default': return true;
        }
        return false;
    }
}

function initSync(module) {
    if (wasm !== undefined) return wasm;


    if (module !== undefined) {
        if (Object.getPrototypeOf(module) === Object.prototype) {
            ({module} = module)
        } else {
            console.warn('using deprecated parameters for `initSync()`; pass a single object instead')
        }
    }

    const imports = __wbg_get_imports();
    if (!(module instanceof WebAssembly.Module)) {
        module = new WebAssembly.Module(module);
    }
    const instance = new WebAssembly.Instance(module, imports);
    return __wbg_finalize_init(instance, module);
}

async function __wbg_init(module_or_path) {
    if (wasm !== undefined) return wasm;


    if (module_or_path !== undefined) {
        if (Object.getPrototypeOf(module_or_path) === Object.prototype) {
            ({module_or_path} = module_or_path)
        } else {
            console.warn('using deprecated parameters for the initialization function; pass a single object instead')
        }
    }

    if (module_or_path === undefined) {
        module_or_path = new URL('wavelock_web_bg.wasm', import.meta.url);
    }
    const imports = __wbg_get_imports();

    if (typeof module_or_path === 'string' || (typeof Request === 'function' && module_or_path instanceof Request) || (typeof URL === 'function' && module_or_path instanceof URL)) {
        module_or_path = fetch(module_or_path);
    }

    const { instance, module } = await __wbg_load(await module_or_path, imports);

    return __wbg_finalize_init(instance, module);
}

export { initSync, __wbg_init as default };
