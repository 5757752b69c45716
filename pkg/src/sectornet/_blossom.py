"""Maximum-weight matching on general graphs, primal-dual blossom method.

Array-based formulation of the classic O(V^3) algorithm (Galil's survey
lineage): vertices are 0..n-1, nontrivial blossoms take ids n..2n-1 from
a free list, and every "labeledge"-style reference is a directed
endpoint index p in [0, 2m) with endpoint(p) = edges_v[p//2] when p is
odd, edges_u[p//2] when even. mate[] stores directed endpoints too, so
the matched edge id is always mate[v] // 2. All recursion from the
textbook formulation (label propagation, blossom expansion and
augmentation, leaf iteration) is replaced with loops and explicit
stacks so the kernel compiles under numba; dual variables are stored
doubled so integer and dyadic-rational weights stay exact in float64.

The kernel returns the mate array; the public wrapper in ``matching``
decodes it into edge ids.
"""

from __future__ import annotations

import numpy as np

from ._jit import maybe_jit


@maybe_jit
def blossom_mate(n_vertices, edges_u, edges_v, weight_2x, nb_ptr, nb_end):
    """Mate array (directed endpoints, -1 = single) of a maximum-weight
    matching. ``nb_end[nb_ptr[v]:nb_ptr[v+1]]`` lists directed endpoints
    p with endpoint(p) being v's neighbor; ``weight_2x`` holds doubled
    edge weights."""
    nvert = n_vertices
    nedge = len(edges_u)
    mate = np.full(nvert, -1, np.int64)
    if nedge == 0 or nvert == 0:
        return mate

    max_w2 = 0.0
    for e in range(nedge):
        if weight_2x[e] > max_w2:
            max_w2 = weight_2x[e]

    ids = 2 * nvert
    label = np.zeros(ids, np.int64)
    label_end = np.full(ids, -1, np.int64)
    in_blossom = np.arange(nvert).astype(np.int64)
    parent = np.full(ids, -1, np.int64)
    blossom_base = np.full(ids, -1, np.int64)
    for v in range(nvert):
        blossom_base[v] = v
    best_edge = np.full(ids, -1, np.int64)
    dual = np.zeros(ids, np.float64)
    for v in range(nvert):
        dual[v] = max_w2
    alive = np.zeros(ids, np.bool_)
    allow_edge = np.zeros(nedge, np.bool_)

    childs = np.full((nvert, nvert + 2), -1, np.int64)
    childs_count = np.zeros(nvert, np.int64)
    child_eps = np.full((nvert, nvert + 2), -1, np.int64)
    mybest = np.full((nvert, ids), -1, np.int64)
    mybest_count = np.zeros(nvert, np.int64)
    has_mybest = np.zeros(nvert, np.bool_)

    unused = np.empty(nvert, np.int64)
    for i in range(nvert):
        unused[i] = 2 * nvert - 1 - i
    unused_count = np.empty(1, np.int64)
    unused_count[0] = nvert

    # Per stage: each vertex enters the scan queue at most once when its
    # blossom turns into an outer one, plus one re-push per dual
    # adjustment that newly admits an edge (at most one per edge).
    queue = np.empty(2 * nvert + 2 * nedge + 16, np.int64)
    queue_count = np.empty(1, np.int64)
    queue_count[0] = 0

    leaf_buf = np.empty(nvert, np.int64)
    leaf_stack = np.empty(2 * nvert + 2, np.int64)
    scan_path = np.empty(ids, np.int64)
    task_b = np.empty(4 * nvert + 4, np.int64)
    task_v = np.empty(4 * nvert + 4, np.int64)
    expand_stack = np.empty(2 * nvert + 2, np.int64)
    path_buf = np.empty(nvert + 2, np.int64)
    eps_buf = np.empty(nvert + 2, np.int64)
    best_to = np.full(ids, -1, np.int64)
    rot_buf = np.empty(nvert + 2, np.int64)

    def endpoint(p):
        e = p >> 1
        if p & 1:
            return edges_v[e]
        return edges_u[e]

    def slack_2x(e):
        return dual[edges_u[e]] + dual[edges_v[e]] - 2.0 * weight_2x[e]

    def collect_leaves(b):
        if b < nvert:
            leaf_buf[0] = b
            return 1
        cnt = 0
        sp = 0
        leaf_stack[sp] = b
        sp += 1
        while sp > 0:
            sp -= 1
            t = leaf_stack[sp]
            if t < nvert:
                leaf_buf[cnt] = t
                cnt += 1
            else:
                row = t - nvert
                for k in range(childs_count[row] - 1, -1, -1):
                    leaf_stack[sp] = childs[row, k]
                    sp += 1
        return cnt

    def queue_push(v):
        queue[queue_count[0]] = v
        queue_count[0] += 1

    def assign_label(w0, t0, p0):
        w = w0
        t = t0
        p = p0
        while True:
            b = in_blossom[w]
            label[w] = t
            label[b] = t
            label_end[w] = p
            label_end[b] = p
            best_edge[w] = -1
            best_edge[b] = -1
            if t == 1:
                cnt = collect_leaves(b)
                for i in range(cnt):
                    queue_push(leaf_buf[i])
                return
            base = blossom_base[b]
            p = mate[base]
            w = endpoint(p)
            t = 1

    def scan_blossom(v0, w0):
        v = v0
        w = w0
        path_count = 0
        base = -1
        while v != -1:
            b = in_blossom[v]
            if label[b] & 4:
                base = blossom_base[b]
                break
            scan_path[path_count] = b
            path_count += 1
            label[b] = 5
            if label_end[b] == -1:
                v = -1
            else:
                v = endpoint(label_end[b] ^ 1)
                b = in_blossom[v]
                v = endpoint(label_end[b] ^ 1)
            if w != -1:
                tmp = v
                v = w
                w = tmp
        for i in range(path_count):
            label[scan_path[i]] = 1
        return base

    def add_blossom(base, p):
        # p is the triggering endpoint: (v, w) = (endpoint(p^1), endpoint(p)).
        v = endpoint(p ^ 1)
        w = endpoint(p)
        bb = in_blossom[base]
        bv = in_blossom[v]
        bw = in_blossom[w]
        unused_count[0] -= 1
        b = unused[unused_count[0]]
        row = b - nvert
        blossom_base[b] = base
        parent[b] = -1
        parent[bb] = b
        alive[b] = True

        n_path = 0
        n_eps = 0
        eps_buf[n_eps] = p ^ 1
        n_eps += 1
        while bv != bb:
            parent[bv] = b
            path_buf[n_path] = bv
            n_path += 1
            eps_buf[n_eps] = label_end[bv] ^ 1
            n_eps += 1
            v2 = endpoint(label_end[bv] ^ 1)
            bv = in_blossom[v2]
        path_buf[n_path] = bb
        n_path += 1
        for i in range(n_path // 2):
            tmp = path_buf[i]
            path_buf[i] = path_buf[n_path - 1 - i]
            path_buf[n_path - 1 - i] = tmp
        for i in range(n_eps // 2):
            tmp = eps_buf[i]
            eps_buf[i] = eps_buf[n_eps - 1 - i]
            eps_buf[n_eps - 1 - i] = tmp
        while bw != bb:
            parent[bw] = b
            path_buf[n_path] = bw
            n_path += 1
            eps_buf[n_eps] = label_end[bw]
            n_eps += 1
            w2 = endpoint(label_end[bw] ^ 1)
            bw = in_blossom[w2]

        childs_count[row] = n_path
        for i in range(n_path):
            childs[row, i] = path_buf[i]
            child_eps[row, i] = eps_buf[i]

        label[b] = 1
        label_end[b] = label_end[bb]
        dual[b] = 0.0

        cnt = collect_leaves(b)
        for i in range(cnt):
            leaf = leaf_buf[i]
            if label[in_blossom[leaf]] == 2:
                queue_push(leaf)
            in_blossom[leaf] = b

        # Least-slack candidate edges toward every neighboring
        # S-blossom, merged over the children.
        for i in range(ids):
            best_to[i] = -1
        for ci in range(n_path):
            child = childs[row, ci]
            if child >= nvert and has_mybest[child - nvert]:
                crow = child - nvert
                m_cnt = mybest_count[crow]
                for k in range(m_cnt):
                    r = mybest[crow, k]
                    j = endpoint(r ^ 1)
                    if in_blossom[j] == b:
                        r = r ^ 1
                        j = endpoint(r ^ 1)
                    bj = in_blossom[j]
                    if bj != b and label[bj] == 1:
                        if best_to[bj] == -1 or slack_2x(r >> 1) < slack_2x(
                            best_to[bj] >> 1
                        ):
                            best_to[bj] = r
                has_mybest[crow] = False
            else:
                lcnt = collect_leaves(child)
                for li in range(lcnt):
                    x = leaf_buf[li]
                    for q in range(nb_ptr[x], nb_ptr[x + 1]):
                        r = nb_end[q] ^ 1
                        j = endpoint(r ^ 1)
                        if in_blossom[j] == b:
                            r = r ^ 1
                            j = endpoint(r ^ 1)
                        bj = in_blossom[j]
                        if bj != b and label[bj] == 1:
                            if best_to[bj] == -1 or slack_2x(r >> 1) < slack_2x(
                                best_to[bj] >> 1
                            ):
                                best_to[bj] = r
            best_edge[child] = -1

        m_cnt = 0
        for i in range(ids):
            if best_to[i] != -1:
                mybest[row, m_cnt] = best_to[i]
                m_cnt += 1
        mybest_count[row] = m_cnt
        has_mybest[row] = True

        be = -1
        bs = 0.0
        for k in range(m_cnt):
            r = mybest[row, k]
            s = slack_2x(r >> 1)
            if be == -1 or s < bs:
                be = r
                bs = s
        best_edge[b] = be

    def child_index(row, t):
        for i in range(childs_count[row]):
            if childs[row, i] == t:
                return i
        return -1

    def mod_idx(j, count):
        jj = j % count
        if jj < 0:
            jj += count
        return jj

    def expand_blossom(b0, endstage):
        sp = 0
        expand_stack[sp] = b0
        sp += 1
        while sp > 0:
            sp -= 1
            b = expand_stack[sp]
            row = b - nvert
            for ci in range(childs_count[row]):
                s = childs[row, ci]
                parent[s] = -1
                if s < nvert:
                    in_blossom[s] = s
                elif endstage and dual[s] == 0.0:
                    expand_stack[sp] = s
                    sp += 1
                else:
                    lcnt = collect_leaves(s)
                    for li in range(lcnt):
                        in_blossom[leaf_buf[li]] = s
            if (not endstage) and label[b] == 2:
                # Relabel along the blossom cycle from the entry child
                # around to the base, then check the remaining children
                # for externally reached vertices.
                count = childs_count[row]
                pe = label_end[b]
                entrychild = in_blossom[endpoint(pe)]
                j = child_index(row, entrychild)
                if j & 1:
                    j -= count
                    jstep = 1
                else:
                    jstep = -1
                while j != 0:
                    if jstep == 1:
                        r = child_eps[row, mod_idx(j, count)]
                        p_v = endpoint(r)
                        q_v = endpoint(r ^ 1)
                    else:
                        r = child_eps[row, mod_idx(j - 1, count)]
                        q_v = endpoint(r)
                        p_v = endpoint(r ^ 1)
                    w_v = endpoint(pe)
                    label[w_v] = 0
                    label[q_v] = 0
                    assign_label(w_v, 2, pe)
                    allow_edge[r >> 1] = True
                    j += jstep
                    if jstep == 1:
                        r = child_eps[row, mod_idx(j, count)]
                        pe = r ^ 1
                    else:
                        r = child_eps[row, mod_idx(j - 1, count)]
                        pe = r
                    allow_edge[r >> 1] = True
                    j += jstep
                bw_sub = childs[row, 0]
                w_v = endpoint(pe)
                label[w_v] = 2
                label[bw_sub] = 2
                label_end[w_v] = pe
                label_end[bw_sub] = pe
                best_edge[bw_sub] = -1
                j += jstep
                while childs[row, mod_idx(j, count)] != entrychild:
                    bv = childs[row, mod_idx(j, count)]
                    if label[bv] == 1:
                        j += jstep
                        continue
                    reached = -1
                    if bv >= nvert:
                        lcnt = collect_leaves(bv)
                        for li in range(lcnt):
                            if label[leaf_buf[li]] != 0:
                                reached = leaf_buf[li]
                                break
                    else:
                        if label[bv] != 0:
                            reached = bv
                    if reached != -1:
                        label[reached] = 0
                        label[endpoint(mate[blossom_base[bv]])] = 0
                        assign_label(reached, 2, label_end[reached])
                    j += jstep
            label[b] = 0
            label_end[b] = -1
            best_edge[b] = -1
            has_mybest[row] = False
            childs_count[row] = 0
            blossom_base[b] = -1
            dual[b] = 0.0
            alive[b] = False
            unused[unused_count[0]] = b
            unused_count[0] += 1

    def augment_blossom(b0, v0):
        tp = 0
        task_b[tp] = b0
        task_v[tp] = v0
        tp += 1
        while tp > 0:
            tp -= 1
            b = task_b[tp]
            v = task_v[tp]
            row = b - nvert
            t = v
            while parent[t] != b:
                t = parent[t]
            if t >= nvert:
                task_b[tp] = t
                task_v[tp] = v
                tp += 1
            count = childs_count[row]
            i = child_index(row, t)
            j = i
            if i & 1:
                j -= count
                jstep = 1
            else:
                jstep = -1
            while j != 0:
                j += jstep
                t2 = childs[row, mod_idx(j, count)]
                if jstep == 1:
                    r = child_eps[row, mod_idx(j, count)]
                    w_v = endpoint(r)
                    x_v = endpoint(r ^ 1)
                else:
                    r = child_eps[row, mod_idx(j - 1, count)]
                    x_v = endpoint(r)
                    w_v = endpoint(r ^ 1)
                if t2 >= nvert:
                    task_b[tp] = t2
                    task_v[tp] = w_v
                    tp += 1
                j += jstep
                t3 = childs[row, mod_idx(j, count)]
                if t3 >= nvert:
                    task_b[tp] = t3
                    task_v[tp] = x_v
                    tp += 1
                mate[endpoint(r)] = r ^ 1
                mate[endpoint(r ^ 1)] = r
            if i > 0:
                for k in range(count):
                    rot_buf[k] = childs[row, mod_idx(i + k, count)]
                for k in range(count):
                    childs[row, k] = rot_buf[k]
                for k in range(count):
                    rot_buf[k] = child_eps[row, mod_idx(i + k, count)]
                for k in range(count):
                    child_eps[row, k] = rot_buf[k]
            blossom_base[b] = v

    def augment_matching(p):
        for side in range(2):
            if side == 0:
                s = endpoint(p ^ 1)
                pj = p
            else:
                s = endpoint(p)
                pj = p ^ 1
            while True:
                bs = in_blossom[s]
                if bs >= nvert:
                    augment_blossom(bs, s)
                mate[s] = pj
                if label_end[bs] == -1:
                    break
                t = endpoint(label_end[bs] ^ 1)
                bt = in_blossom[t]
                q = label_end[bt]
                s = endpoint(q ^ 1)
                jv = endpoint(q)
                if bt >= nvert:
                    augment_blossom(bt, jv)
                mate[jv] = q ^ 1
                pj = q

    while True:
        for i in range(ids):
            label[i] = 0
            label_end[i] = -1
            best_edge[i] = -1
        for i in range(nvert):
            has_mybest[i] = False
        for e in range(nedge):
            allow_edge[e] = False
        queue_count[0] = 0

        for v in range(nvert):
            if mate[v] == -1 and label[in_blossom[v]] == 0:
                assign_label(v, 1, -1)

        augmented = False
        while True:
            while queue_count[0] > 0 and not augmented:
                queue_count[0] -= 1
                v = queue[queue_count[0]]
                for q in range(nb_ptr[v], nb_ptr[v + 1]):
                    pw = nb_end[q]
                    w = endpoint(pw)
                    e = pw >> 1
                    bv = in_blossom[v]
                    bw = in_blossom[w]
                    if bv == bw:
                        continue
                    kslack = 0.0
                    if not allow_edge[e]:
                        kslack = slack_2x(e)
                        if kslack <= 0.0:
                            allow_edge[e] = True
                    if allow_edge[e]:
                        if label[bw] == 0:
                            assign_label(w, 2, pw)
                        elif label[bw] == 1:
                            base = scan_blossom(v, w)
                            if base >= 0:
                                add_blossom(base, pw)
                            else:
                                augment_matching(pw)
                                augmented = True
                                break
                        elif label[w] == 0:
                            label[w] = 2
                            label_end[w] = pw
                    elif label[bw] == 1:
                        if best_edge[bv] == -1 or kslack < slack_2x(
                            best_edge[bv] >> 1
                        ):
                            best_edge[bv] = pw ^ 1
                    elif label[w] == 0:
                        if best_edge[w] == -1 or kslack < slack_2x(
                            best_edge[w] >> 1
                        ):
                            best_edge[w] = pw ^ 1

            if augmented:
                break

            deltatype = 1
            delta = dual[0]
            for v in range(1, nvert):
                if dual[v] < delta:
                    delta = dual[v]
            deltaedge = -1
            deltablossom = -1

            for v in range(nvert):
                if label[in_blossom[v]] == 0 and best_edge[v] != -1:
                    d = slack_2x(best_edge[v] >> 1)
                    if d < delta:
                        delta = d
                        deltatype = 2
                        deltaedge = best_edge[v]

            for b in range(ids):
                top = False
                if b < nvert:
                    top = parent[b] == -1
                else:
                    top = alive[b] and parent[b] == -1
                if top and label[b] == 1 and best_edge[b] != -1:
                    d = slack_2x(best_edge[b] >> 1) / 2.0
                    if d < delta:
                        delta = d
                        deltatype = 3
                        deltaedge = best_edge[b]

            for b in range(nvert, ids):
                if (
                    alive[b]
                    and parent[b] == -1
                    and label[b] == 2
                    and dual[b] < delta
                ):
                    delta = dual[b]
                    deltatype = 4
                    deltablossom = b

            for v in range(nvert):
                lb = label[in_blossom[v]]
                if lb == 1:
                    dual[v] -= delta
                elif lb == 2:
                    dual[v] += delta
            for b in range(nvert, ids):
                if alive[b] and parent[b] == -1:
                    if label[b] == 1:
                        dual[b] += delta
                    elif label[b] == 2:
                        dual[b] -= delta

            if deltatype == 1:
                break
            elif deltatype == 2:
                allow_edge[deltaedge >> 1] = True
                queue_push(endpoint(deltaedge))
            elif deltatype == 3:
                allow_edge[deltaedge >> 1] = True
                queue_push(endpoint(deltaedge))
            elif deltatype == 4:
                expand_blossom(deltablossom, False)

        if not augmented:
            break

        for b in range(nvert, ids):
            if (
                alive[b]
                and parent[b] == -1
                and label[b] == 1
                and dual[b] == 0.0
            ):
                expand_blossom(b, True)

    return mate
